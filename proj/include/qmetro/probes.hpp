#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qmetro/fockspace.hpp"

namespace qm {

// Pure state vector or density matrix on a truncated space.
struct ProbeState {
    ModeSpace space;
    CVector psi;          // set for pure states
    CMatrix rho;          // set for mixed states (psi left empty)
    double nbar = 0.0;    // mean of the resource operator (total quanta)
    std::string kind;
    double leakage = 0.0; // top-level Fock occupation, see top_level_leakage

    bool is_pure() const { return rho.size() == 0; }
    CMatrix density() const;
    // rho = sum_k w_k v_k v_k^dagger with w_k > tol; pure states give one term.
    std::pair<RVector, CMatrix> components(double tol = 1e-14) const;
};

// Commuting Hermitian generators K_1..K_d of U(theta) = exp(-i sum K_k theta_k).
// Generators that are diagonal in the number basis (every one used here) are
// kept as their diagonals so that large spaces never need dense operators.
struct Generator {
    std::vector<RVector> diagonals;  // diagonal case
    std::vector<CMatrix> ops;        // general case, empty when diagonal

    static Generator from_diagonals(std::vector<RVector> diagonals);
    // Detects diagonal input and stores it compactly.
    static Generator from_operators(std::vector<CMatrix> ops, double tol = 1e-12);

    Index size() const { return Index(is_diagonal() ? diagonals.size() : ops.size()); }
    Index dim() const;
    bool is_diagonal() const { return ops.empty(); }
    CMatrix op(Index k) const;
};

// Joint eigenspaces of commuting generators. For the diagonal case the sectors
// are groups of basis states with the same eigenvalue tuple.
struct SectorDecomposition {
    RMatrix eigenvalues;                      // parameters x sectors
    std::vector<std::vector<Index>> members;  // basis indices per sector
    CMatrix basis;                            // joint eigenbasis, empty when diagonal

    Index sectors() const { return eigenvalues.cols(); }
    // Columns are the projections P_s v.
    CMatrix components(const CVector& v) const;
};
SectorDecomposition spectral_sectors(const Generator& gen, double tol = 1e-9);

enum class ProbeKind { coherent, noon, tsv, ses, tsc_optimal, tsc_intermediate };

ProbeKind parse_probe_kind(const std::string& name);
std::string to_string(ProbeKind kind);
const std::vector<ProbeKind>& optical_probe_kinds();

// Per-mode cutoffs of the canonical optical probes.
int canonical_cutoff(ProbeKind kind, double nbar = 2.0);

// Largest leakage accepted by make_probe (probability on the top Fock level).
inline constexpr double kLeakageGate = 2e-5;
// Relative gap accepted between the requested and the truncated mean quanta.
inline constexpr double kResourceTolerance = 1e-4;

ProbeState make_probe(ProbeKind kind, double nbar = 2.0);

// Two identical squeezed cat modes, [S(r)(D(a)+D(-a))|0>]^{(x)2}, normalized.
struct TscParameters {
    double r = 0.0;
    double alpha = 0.0;
};
ProbeState make_tsc(double r, double alpha, int cutoff = 51);
// alpha giving mean total photon number nbar at fixed r (root search near alpha0).
double tsc_alpha_for_nbar(double r, double nbar, double alpha0, int cutoff = 51);
// Maximum of the quantum Fisher information at fixed nbar.
TscParameters tsc_optimize(double nbar, int cutoff = 51);
// The member of the family with a prescribed Fisher information (lower-r branch).
TscParameters tsc_for_fisher(double fq, double nbar, int cutoff = 51);

// J_z for the Mach-Zehnder phase difference.
Generator interferometer_generator(const ModeSpace& space);
// N_j on each listed mode.
Generator number_generators(const ModeSpace& space, const std::vector<int>& modes);
// sigma_z / 2 on each of d qubits.
Generator qubit_network_generators(int d);

double expectation(const ProbeState& probe, const CMatrix& op);
double mean_quanta(const ProbeState& probe);
// Largest marginal probability of the top Fock level over all modes.
double top_level_leakage(const ProbeState& probe);

// Mandel Q and inter-mode correlation J of a path-symmetric two-mode probe.
struct Correlations {
    double Q = 0.0;
    double J = 0.0;
};
Correlations correlations(const ProbeState& probe);

// U(theta) for commuting generators, applied as a unitary.
CMatrix encoding_unitary(const Generator& gen, const RVector& theta);
ProbeState encode(const ProbeState& probe, const Generator& gen, const RVector& theta);

// Two photons, sum_k c_k |k, 2-k>, on cutoff 3 per mode.
ProbeState make_two_photon_state(const std::vector<cplx>& c);
// Loss with transmissivity eta in mode 1 followed by exp(-i N_1 phi).
ProbeState lossy_encode(const ProbeState& probe, double eta, double phi);

// (|0..0> + |1..1>)(1-gamma) + gamma (|0>+|1>)^{(x)d}, normalized; d = 2 reduces
// to (|00> + gamma(|01>+|10>) + |11>) / sqrt(2(1+gamma^2)).
ProbeState make_qubit_network(double gamma, int d = 2);
// Inter-sensor correlation of the gamma family.
double qubit_network_correlation(double gamma, int d);

// d sensor modes plus a reference mode (mode 0).
// Global: (alpha|nbar,0..0> + |0,nbar,0..> + ... + |0..0,nbar>)/sqrt(d+alpha^2).
ProbeState make_imaging_global(int d, int nbar, double alpha);
// Local: every mode in sqrt(1-q)|0> + sqrt(q)|N>, q = nbar/(N(d+1)).
ProbeState make_imaging_local(int d, double nbar, int big_n);

}  // namespace qm
