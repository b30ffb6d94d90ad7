#include "qmetro/measurements.hpp"

#include <cmath>
#include <map>

namespace qm {

namespace {

CVector number_phase(const ModeSpace& space, double c1, double c2) {
    // exp(i (c1 n1 + c2 n2))
    CVector ph(space.dim());
    for (Index i = 0; i < space.dim(); ++i) {
        const auto occ = space.occupation(i);
        ph(i) = std::exp(cplx(0, c1 * occ[0] + c2 * occ[1]));
    }
    return ph;
}

// Apply (L_0 (x) L_1 (x) ...) or its adjoint to every column of v, mode by mode.
void apply_locals(const std::vector<CMatrix>& locals, int cutoff, CMatrix& v, bool adjoint) {
    const int modes = int(locals.size());
    const Index dim = v.rows();
    Index after = dim;
    CMatrix tmp;
    for (int m = 0; m < modes; ++m) {
        after /= cutoff;
        const Index before = dim / (after * cutoff);
        const CMatrix l = adjoint ? CMatrix(locals[size_t(m)].conjugate()) : CMatrix(locals[size_t(m)].transpose());
        for (Index c = 0; c < v.cols(); ++c) {
            for (Index b = 0; b < before; ++b) {
                Eigen::Map<CMatrix> x(v.col(c).data() + b * cutoff * after, after, cutoff);
                tmp.noalias() = x * l;
                x = tmp;
            }
        }
    }
}

}  // namespace

PomName parse_pom_name(const std::string& name) {
    static const std::map<std::string, PomName> names = {
        {"counting_even", PomName::counting_even},
        {"counting_odd", PomName::counting_odd},
        {"quadrature_pi8", PomName::quadrature_pi8},
        {"undo_count_coherent", PomName::undo_count_coherent},
        {"parity", PomName::parity},
        {"qubit_local", PomName::qubit_local},
    };
    auto it = names.find(name);
    if (it == names.end()) throw std::invalid_argument("unknown POM '" + name + "'");
    return it->second;
}

std::string to_string(PomName name) {
    switch (name) {
        case PomName::counting_even: return "counting_even";
        case PomName::counting_odd: return "counting_odd";
        case PomName::quadrature_pi8: return "quadrature_pi8";
        case PomName::undo_count_coherent: return "undo_count_coherent";
        case PomName::parity: return "parity";
        case PomName::qubit_local: return "qubit_local";
    }
    return "?";
}

Index Pom::column_count() const { return is_explicit() ? columns.cols() : space.dim(); }

CMatrix Pom::overlaps(const CMatrix& v) const {
    if (v.rows() != space.dim()) throw std::invalid_argument("Pom::overlaps: dimension mismatch");
    if (is_explicit()) return columns.adjoint() * v;
    CMatrix out = phase.size() ? CMatrix(phase.conjugate().asDiagonal() * v) : v;
    if (mixer.rows() > 0) out = CMatrix(mixer.adjoint() * out);
    if (!locals.empty()) apply_locals(locals, space.cutoff, out, true);
    return out;
}

CMatrix Pom::dense_columns() const {
    if (is_explicit()) return columns;
    CMatrix out = identity(space.dim());
    if (!locals.empty()) apply_locals(locals, space.cutoff, out, false);
    if (mixer.rows() > 0) out = CMatrix(mixer * out);
    if (phase.size()) out = phase.asDiagonal() * out;
    return out;
}

double Pom::completeness_defect() const {
    if (is_explicit()) {
        const Index k = columns.cols();
        const double ortho = max_abs(columns.adjoint() * columns - identity(k));
        if (completion) return ortho;
        return std::max(ortho, max_abs(columns * columns.adjoint() - identity(space.dim())));
    }
    // A product of unitary factors resolves the identity exactly.
    double worst = 0.0;
    for (const auto& l : locals) worst = std::max(worst, max_abs(l.adjoint() * l - identity(l.rows())));
    if (phase.size()) worst = std::max(worst, (phase.cwiseAbs() - RVector::Ones(phase.size())).cwiseAbs().maxCoeff());
    if (mixer.rows() > 0) {
        CSparse id(mixer.rows(), mixer.cols());
        id.setIdentity();
        const CSparse d = CSparse(mixer.adjoint()) * mixer - id;
        for (Index k = 0; k < d.outerSize(); ++k)
            for (CSparse::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

Pom catalog_pom(PomName name, const ModeSpace& space) {
    Pom pom;
    pom.space = space;
    pom.name = to_string(name);
    const Index dim = space.dim();
    if (name == PomName::qubit_local) {
        if (space.cutoff != 2) throw std::invalid_argument("qubit_local: needs a qubit space");
        CMatrix h(2, 2);
        h << 1, 1, 1, -1;
        h /= std::sqrt(2.0);
        pom.locals.assign(size_t(space.modes), h);
        pom.labels.resize(dim, space.modes);
        for (Index i = 0; i < dim; ++i) {
            const auto occ = space.occupation(i);
            for (int m = 0; m < space.modes; ++m) pom.labels(i, m) = occ[m] == 0 ? 1.0 : -1.0;
        }
        return pom;
    }
    if (space.modes != 2) throw std::invalid_argument(pom.name + ": needs two optical modes");
    pom.mixer = beam_splitter_sparse(space);
    pom.labels.resize(dim, 1);
    for (Index i = 0; i < dim; ++i) {
        const auto occ = space.occupation(i);
        pom.labels(i, 0) = double(occ[0]) * double(occ[1]);
    }
    switch (name) {
        case PomName::counting_even: pom.phase = number_phase(space, 0.0, -0.25 * kPi); break;
        case PomName::counting_odd: pom.phase = number_phase(space, 0.0, -0.5 * kPi); break;
        case PomName::parity: {
            pom.phase = number_phase(space, 0.0, -0.25 * kPi);
            for (Index i = 0; i < dim; ++i) pom.labels(i, 0) = (space.total_quanta(i) % 2) ? -1.0 : 1.0;
            break;
        }
        case PomName::quadrature_pi8: {
            const CMatrix c = creation_matrix(space.cutoff);
            const cplx e = std::exp(cplx(0, kPi / 8.0));
            const CMatrix x = (e * c + std::conj(e) * c.adjoint()) / std::sqrt(2.0);
            const EigenSystem es = hermitian_eig(x);
            pom.locals = {es.vectors, es.vectors};
            pom.phase = number_phase(space, 0.25 * kPi, 0.0);
            for (Index i = 0; i < dim; ++i) {
                const auto occ = space.occupation(i);
                pom.labels(i, 0) = es.values(occ[0]) * es.values(occ[1]);
            }
            break;
        }
        case PomName::undo_count_coherent: {
            const CMatrix d = displacement(ModeSpace(space.cutoff, 1), 0, std::sqrt(2.0));
            pom.locals = {CMatrix(d.adjoint()), identity(space.cutoff)};
            pom.phase = number_phase(space, 0.5 * kPi, -0.5 * kPi);
            break;
        }
        default: break;
    }
    return pom;
}

Pom explicit_pom(const ModeSpace& space, CMatrix columns, RMatrix labels, bool completion, std::string name) {
    if (columns.rows() != space.dim()) throw std::invalid_argument("explicit_pom: dimension mismatch");
    Pom pom;
    pom.space = space;
    pom.name = std::move(name);
    pom.columns = std::move(columns);
    pom.completion = completion;
    pom.labels = std::move(labels);
    if (pom.labels.rows() != pom.outcomes()) throw std::invalid_argument("explicit_pom: one label row per outcome");
    return pom;
}

Index LikelihoodModel::outcomes() const {
    return (amplitudes.empty() ? 0 : amplitudes.front().rows()) + (completion ? 1 : 0);
}

RMatrix LikelihoodModel::evaluate(const RMatrix& thetas) const {
    if (thetas.rows() != lambdas.rows()) throw std::invalid_argument("likelihood: parameter count mismatch");
    const Index points = thetas.cols(), cols = amplitudes.front().rows();
    // phases(s, j) = exp(-i lambda_s . theta_j)
    const RMatrix arg = lambdas.transpose() * thetas;
    CMatrix phases(arg.rows(), arg.cols());
    for (Index j = 0; j < points; ++j)
        for (Index s = 0; s < arg.rows(); ++s) phases(s, j) = std::polar(1.0, -arg(s, j));
    RMatrix p = RMatrix::Zero(outcomes(), points);
    for (size_t c = 0; c < amplitudes.size(); ++c)
        p.topRows(cols) += weights[c] * (amplitudes[c] * phases).cwiseAbs2();
    for (Index j = 0; j < points; ++j) {
        const double total = p.col(j).head(cols).sum();
        if (completion) p(cols, j) = 1.0 - total;
        else if (std::abs(1.0 - total) > kCompletenessTol)
            throw NumericalError("completeness", "likelihood sums to " + std::to_string(total));
        if (completion && total > 1.0 + kCompletenessTol)
            throw NumericalError("completeness", "likelihood sums to " + std::to_string(total));
        for (Index m = 0; m < p.rows(); ++m) {
            if (p(m, j) < -kNegativeClamp) throw NumericalError("positivity", "negative probability");
            if (std::abs(p(m, j)) < kNegativeClamp) p(m, j) = 0.0;
        }
    }
    return p;
}

LikelihoodModel likelihood_model(const ProbeState& probe, const Generator& gen, const Pom& pom) {
    if (!(pom.space == probe.space)) throw std::invalid_argument("likelihood: probe and POM spaces differ");
    if (gen.dim() != probe.space.dim()) throw std::invalid_argument("likelihood: generator dimension mismatch");
    if (pom.completeness_defect() > kCompletenessTol)
        throw NumericalError("completeness", "POM " + pom.name + " does not resolve the identity");
    const SectorDecomposition sec = spectral_sectors(gen);
    const auto [w, v] = probe.components();
    LikelihoodModel model;
    model.lambdas = sec.eigenvalues;
    model.completion = pom.completion;
    for (Index c = 0; c < w.size(); ++c) {
        model.weights.push_back(w(c));
        model.amplitudes.push_back(pom.overlaps(sec.components(v.col(c))));
    }
    return model;
}

RMatrix likelihood_table(const ProbeState& probe, const Generator& gen, const Pom& pom, const RMatrix& thetas) {
    return likelihood_model(probe, gen, pom).evaluate(thetas);
}

RMatrix likelihood_table(const ProbeState& probe, const Generator& gen, const Pom& pom, const RVector& thetas) {
    return likelihood_table(probe, gen, pom, RMatrix(thetas.transpose()));
}

}  // namespace qm
