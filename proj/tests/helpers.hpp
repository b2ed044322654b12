#pragma once

// Small field constructors shared by the test suites.

#include <complex>

#include "tsl/field.hpp"
#include "tsl/grid.hpp"

namespace testutil {

// amplitude * cos(m x_axis + phase)
inline tsl::SpectralField make_cos(const tsl::TorusGrid& g, int axis, int m,
                                   double amplitude = 1.0, double phase = 0.0) {
    tsl::SpectralField f(g, 1);
    int kp[tsl::kMaxDim] = {0, 0, 0, 0};
    int km[tsl::kMaxDim] = {0, 0, 0, 0};
    kp[axis] = m;
    km[axis] = -m;
    const tsl::cplx half{0.5 * amplitude, 0.0};
    const tsl::cplx rot{std::cos(phase), std::sin(phase)};
    f.comp(0)[g.flatten(kp)] = half * rot;
    f.comp(0)[g.flatten(km)] = half * std::conj(rot);
    return f;
}

inline tsl::SpectralField make_constant(const tsl::TorusGrid& g, double value, int ncomp = 1) {
    tsl::SpectralField f(g, ncomp);
    for (int c = 0; c < ncomp; ++c) f.comp(c)[0] = value;
    return f;
}

// The pair (cos(k.x), sin(k.x)) as a two-component field; together they
// represent e^{ik.x} through its real and imaginary parts.
inline tsl::SpectralField make_exp_pair(const tsl::TorusGrid& g, const int* k) {
    tsl::SpectralField f(g, 2);
    int mk[tsl::kMaxDim];
    for (int a = 0; a < g.dim; ++a) mk[a] = -k[a];
    f.comp(0)[g.flatten(k)] = {0.5, 0.0};
    f.comp(0)[g.flatten(mk)] = {0.5, 0.0};
    f.comp(1)[g.flatten(k)] = {0.0, -0.5};
    f.comp(1)[g.flatten(mk)] = {0.0, 0.5};
    return f;
}

}  // namespace testutil
