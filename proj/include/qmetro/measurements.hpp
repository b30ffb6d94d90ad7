#pragma once

#include <string>
#include <vector>

#include "qmetro/probes.hpp"

namespace qm {

enum class PomName { counting_even, counting_odd, quadrature_pi8, undo_count_coherent, parity, qubit_local };

PomName parse_pom_name(const std::string& name);
std::string to_string(PomName name);

// Largest completeness defect tolerated before a likelihood is rejected.
inline constexpr double kCompletenessTol = 1e-7;
// Probabilities this small are clamped to zero; anything more negative throws.
inline constexpr double kNegativeClamp = 1e-12;

// Rank-one projective measurement. The outcome columns are either
//   diag(phase) * mixer * (locals[0] (x) locals[1] (x) ...) |k>
// for the catalog schemes, or an explicit orthonormal set of columns,
// optionally closed by one extra outcome I - sum_k |c_k><c_k|.
struct Pom {
    ModeSpace space;
    std::string name;
    CVector phase;                // empty means identity
    CSparse mixer;                // 0 x 0 means identity
    std::vector<CMatrix> locals;  // empty means identity on every mode
    CMatrix columns;              // explicit form when non-empty
    bool completion = false;
    RMatrix labels;               // outcomes x label dimension

    bool is_explicit() const { return columns.size() > 0; }
    // Outcomes with a column (the completion outcome, if any, is extra).
    Index column_count() const;
    Index outcomes() const { return column_count() + (completion ? 1 : 0); }

    // <c_k|v> for every column k, applied to each column of V.
    CMatrix overlaps(const CMatrix& v) const;
    // All columns as a dense matrix (small spaces only).
    CMatrix dense_columns() const;
    // max-norm distance of the effects from a resolution of the identity.
    double completeness_defect() const;
};

Pom catalog_pom(PomName name, const ModeSpace& space);
Pom explicit_pom(const ModeSpace& space, CMatrix columns, RMatrix labels, bool completion,
                 std::string name = "explicit");

// p(m|theta) for every outcome m (rows) and every column of thetas
// (parameters x points). Completeness is checked per point.
RMatrix likelihood_table(const ProbeState& probe, const Generator& gen, const Pom& pom, const RMatrix& thetas);
RMatrix likelihood_table(const ProbeState& probe, const Generator& gen, const Pom& pom, const RVector& thetas);

// Sector amplitudes: p(m|theta) = sum_c w_c |sum_s A_c(m, s) exp(-i lambda_s . theta)|^2
// plus the completion outcome. Shared with the Monte-Carlo engine.
struct LikelihoodModel {
    RMatrix lambdas;                  // parameters x sectors
    std::vector<double> weights;      // mixture weights of the probe components
    std::vector<CMatrix> amplitudes;  // per component: column outcomes x sectors
    bool completion = false;

    Index outcomes() const;
    RMatrix evaluate(const RMatrix& thetas) const;
};
LikelihoodModel likelihood_model(const ProbeState& probe, const Generator& gen, const Pom& pom);

}  // namespace qm
