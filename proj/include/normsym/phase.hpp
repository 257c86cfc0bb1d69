#pragma once

#include "normsym/geometry.hpp"
#include "normsym/symbol.hpp"
#include "normsym/util.hpp"

#include <map>

namespace normsym {

// Derivatives of the phase function phi(y,xi) = <xi, z_{pi(xi)}(y)>:
// phi_{alpha,beta}(xi) differentiates beta times in the z_y coordinates of
// the moving point at y, then alpha times in the z_x coordinates of the
// center y, both evaluated at coincidence y = pi(xi). Moving-point frames are
// the x-radially transported ones.
struct PhaseJet {
    Covector base;
    int dim = 0;
    int max_order = 0;
    std::map<std::pair<MultiIndex, MultiIndex>, double> entries;

    double at(const MultiIndex& alpha, const MultiIndex& beta) const {
        auto it = entries.find({alpha, beta});
        if (it == entries.end()) throw DepthExceeded("phase jet entry outside computed depth");
        return it->second;
    }
};

// zeta-independent tensors T^k with phi_{alpha,beta}(xi) = sum_k zeta_k T^k_{alpha,beta}
struct PhaseTensors {
    int dim = 0;
    int max_alpha = 0, max_beta = 0;
    std::map<std::pair<MultiIndex, MultiIndex>, Vec> tensors;

    const Vec& at(const MultiIndex& alpha, const MultiIndex& beta) const {
        auto it = tensors.find({alpha, beta});
        if (it == tensors.end()) throw DepthExceeded("phase tensor outside computed depth");
        return it->second;
    }
};

// Coordinate-change derivative tensors at coincidence.
struct ChartChangeJet {
    Vec base;
    Mat first;                  // dz_x^k/dz_y^l at coincidence (= identity)
    std::vector<double> second; // d^2 z_x^k/dz_y^l dz_y^m at coincidence, layout (k,l,m)
    std::vector<double> third;  // d/dz_x^n of the above at coincidence, layout (k,n,l,m)
    int d = 0;

    double second_at(int k, int l, int m) const { return second[(k * d + l) * d + m]; }
    double third_at(int k, int n, int l, int m) const {
        return third[((k * d + n) * d + l) * d + m];
    }
};

inline constexpr int kMaxPhaseDepth = 5;

// phi_{alpha,beta} for |alpha| <= depth, |beta| <= depth, |alpha|+|beta| <= depth+2;
// throws DepthExceeded beyond kMaxPhaseDepth
PhaseJet phase_jet(std::shared_ptr<const Manifold> m, const Covector& xi, int depth);

// tensors T^k for |alpha| <= max_alpha, |beta| <= max_beta
PhaseTensors phase_tensors(const std::shared_ptr<const Manifold>& m, const Vec& x, int max_alpha,
                           int max_beta);

// Coincidence-limit tensors computed two ways (curvature formula and finite
// differences of nested log maps); throws OracleMismatch if they disagree
// beyond 1e-5 on the third tensor.
ChartChangeJet chart_change_jet(const std::shared_ptr<const Manifold>& m, const Vec& x);

} // namespace normsym
