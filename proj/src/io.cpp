#include "tsl/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "TSLF writer assumes a little-endian host");

namespace tsl {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'L', 'F'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::ifstream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

void save_field(const std::string& path, const SpectralField& f, const nlohmann::json& meta) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_field: cannot open " + path);
    os.write(kMagic, 4);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(f.grid.dim));
    write_u32(os, static_cast<std::uint32_t>(f.grid.n));
    write_u32(os, static_cast<std::uint32_t>(f.ncomp));
    for (int c = 0; c < f.ncomp; ++c) {
        auto s = f.comp(c);
        for (const cplx& z : s) {
            const double re = z.real(), im = z.imag();
            os.write(reinterpret_cast<const char*>(&re), sizeof re);
            os.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
    }
    if (!os) throw std::runtime_error("save_field: write failed for " + path);

    nlohmann::json side = meta;
    side["format"] = "TSLF";
    side["version"] = kVersion;
    side["dim"] = f.grid.dim;
    side["n"] = f.grid.n;
    side["ncomp"] = f.ncomp;
    std::ofstream js(path + ".json", std::ios::trunc);
    js << side.dump(2) << "\n";
}

SpectralField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_field: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("load_field: bad magic");
    const std::uint32_t version = read_u32(is);
    if (version != kVersion) throw std::runtime_error("load_field: unsupported version");
    const int dim = static_cast<int>(read_u32(is));
    const int n = static_cast<int>(read_u32(is));
    const int ncomp = static_cast<int>(read_u32(is));
    SpectralField f(TorusGrid(dim, n), ncomp);
    for (cplx& z : f.coef) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), sizeof re);
        is.read(reinterpret_cast<char*>(&im), sizeof im);
        z = {re, im};
    }
    if (!is) throw std::runtime_error("load_field: truncated file " + path);
    return f;
}

nlohmann::json load_sidecar(const std::string& path) {
    std::ifstream js(path + ".json");
    if (!js) throw std::runtime_error("load_sidecar: missing sidecar for " + path);
    nlohmann::json j;
    js >> j;
    return j;
}

}  // namespace tsl
