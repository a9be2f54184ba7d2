#pragma once

#include <complex>
#include <string>

namespace ndsl {

enum class GhostTag {
    ordinary,
    degenerate_real_ghost,
    nondegenerate_real_ghost,
    complex_ghost_degenerate,
    complex_ghost_nondegenerate,
};

/// Ghost taxonomy of an eigenfunction. ground_state applies to real tags
/// only (no interior zeros); borderline marks a degeneracy call made inside
/// the tolerance band with an ambiguous sign.
struct GhostClass {
    GhostTag tag = GhostTag::ordinary;
    bool ground_state = false;
    bool borderline = false;
    bool zero_eigenvalue = false;
};

struct FormValues {
    std::complex<double> weighted_sq;  // int phi^2 w (real for real phi)
    double weighted_abs;               // int |phi|^2 w
    double dirichlet;                  // int p|phi'|^2 + q|phi|^2
    double abs_scale;                  // int |phi|^2 |w|, relative-test scale
    double norm_sq;                    // int |phi|^2
    double quad_error;                 // estimated quadrature error
};

inline const char* to_string(GhostTag t) {
    switch (t) {
        case GhostTag::ordinary: return "ordinary";
        case GhostTag::degenerate_real_ghost: return "degenerate_real_ghost";
        case GhostTag::nondegenerate_real_ghost:
            return "nondegenerate_real_ghost";
        case GhostTag::complex_ghost_degenerate:
            return "complex_ghost_degenerate";
        case GhostTag::complex_ghost_nondegenerate:
            return "complex_ghost_nondegenerate";
    }
    return "?";
}

}  // namespace ndsl
