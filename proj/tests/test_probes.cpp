#include "doctest.h"
#include "qmetro/bounds.hpp"
#include "qmetro/probes.hpp"

#include <cmath>
#include <random>

using namespace qm;

namespace {

double trace_distance(const CMatrix& a, const CMatrix& b) {
    const EigenSystem es = hermitian_eig(a - b, 1e-9);
    return 0.5 * es.values.cwiseAbs().sum();
}

}  // namespace

TEST_CASE("every canonical probe is normalised with two photons on average") {
    for (ProbeKind kind : optical_probe_kinds()) {
        CAPTURE(to_string(kind));
        const ProbeState p = make_probe(kind);
        CHECK(p.is_pure());
        CHECK(std::abs(p.psi.norm() - 1.0) <= 1e-10);
        CHECK(mean_quanta(p) == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(p.leakage <= kLeakageGate);
        CHECK(parse_probe_kind(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(parse_probe_kind("squeezed_light"), std::invalid_argument);
    CHECK_THROWS(make_probe(ProbeKind::ses, 3.0));
    CHECK(mean_quanta(make_probe(ProbeKind::coherent, 5.0)) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("NOON probe is the closed form") {
    const ProbeState p = make_probe(ProbeKind::noon);
    const ModeSpace& sp = p.space;
    CHECK(sp.cutoff == 3);
    CVector expected = CVector::Zero(sp.dim());
    expected(sp.index({2, 0})) = expected(sp.index({0, 2})) = 1.0 / std::sqrt(2.0);
    CHECK(max_abs(p.psi - expected) < 1e-15);
}

TEST_CASE("twin squeezed vacuum matches the product of single-mode squeezed vacua") {
    const ProbeState p = make_probe(ProbeKind::tsv);
    const double r = std::asinh(1.0);
    const int c = p.space.cutoff;
    // <2k|S(r)|0> = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r))
    CVector single = CVector::Zero(c);
    for (int k = 0; 2 * k < c; ++k) {
        const double logc = 0.5 * std::lgamma(2.0 * k + 1) - k * std::log(2.0) - std::lgamma(k + 1.0);
        single(2 * k) = std::pow(-std::tanh(r), k) * std::exp(logc) / std::sqrt(std::cosh(r));
    }
    const CVector expected = kron(single, single).normalized();
    CHECK(std::abs(std::abs(expected.dot(p.psi)) - 1.0) < 1e-8);
}

TEST_CASE("correlation parameters of the canonical probes") {
    struct Row {
        ProbeKind kind;
        double Q, J, fq;
    };
    const Row rows[] = {{ProbeKind::coherent, 0.0, 0.0, 2.0},    {ProbeKind::noon, 0.0, -1.0, 4.0},
                        {ProbeKind::tsv, 3.0, 0.0, 8.0},         {ProbeKind::ses, 9.0, -0.1, 22.0},
                        {ProbeKind::tsc_intermediate, 10.0, 0.0, 22.0},
                        {ProbeKind::tsc_optimal, 11.75, 0.0, 25.49}};
    for (const Row& row : rows) {
        CAPTURE(to_string(row.kind));
        const ProbeState p = make_probe(row.kind);
        const Correlations c = correlations(p);
        CHECK(c.Q == doctest::Approx(row.Q).epsilon(0.01).scale(1.0));
        CHECK(c.J == doctest::Approx(row.J).epsilon(0.01).scale(1.0));
        const double fq = qfi(p, interferometer_generator(p.space));
        CHECK(fq == doctest::Approx(row.fq).epsilon(0.1 / row.fq));
        // 4 Var(J_z) = nbar (1 + Q)(1 - J)
        CHECK(fq == doctest::Approx(mean_quanta(p) * (1.0 + c.Q) * (1.0 - c.J)).epsilon(1e-5));
    }
}

TEST_CASE("correlations rejects an unbalanced probe") {
    const ModeSpace sp(3, 2);
    ProbeState p;
    p.space = sp;
    p.psi = CVector::Zero(sp.dim());
    p.psi(sp.index({1, 0})) = 1.0;
    CHECK_THROWS_AS(correlations(p), std::invalid_argument);
}

TEST_CASE("numerical optimum of the squeezed cat family") {
    const TscParameters table{1.215, 0.9601};
    const TscParameters best = tsc_optimize(2.0);
    const Generator gen = interferometer_generator(ModeSpace(51, 2));
    // the tabulated pair carries 2.0024 photons; compare on the nbar = 2 curve
    const double alpha_table_r = tsc_alpha_for_nbar(table.r, 2.0, table.alpha);
    CHECK(mean_quanta(make_tsc(table.r, table.alpha)) == doctest::Approx(2.0).epsilon(2e-3));
    const double f_table = qfi(make_tsc(table.r, alpha_table_r), gen);
    const double f_best = qfi(make_tsc(best.r, best.alpha), gen);
    CHECK(f_best >= f_table - 1e-9);
    CHECK(f_best == doctest::Approx(25.49).epsilon(0.01 / 25.49));
    CHECK(mean_quanta(make_tsc(best.r, best.alpha)) == doctest::Approx(2.0).epsilon(1e-6));
    // The maximum is flat, the optimum lands about 1.4e-3 from the tabulated pair.
    CHECK(std::abs(best.r - table.r) < 2e-3);
    CHECK(std::abs(best.alpha - table.alpha) < 2e-3);
    CHECK(f_table == doctest::Approx(f_best).epsilon(1e-4));
}

TEST_CASE("encoding with the interferometer generator") {
    const ProbeState p = make_probe(ProbeKind::noon);
    const Generator gen = interferometer_generator(p.space);
    const ProbeState same = encode(p, gen, RVector::Zero(1));
    CHECK(max_abs(same.psi - p.psi) == 0.0);

    const double theta = 0.37;
    const ProbeState q = encode(p, gen, RVector::Constant(1, theta));
    const Index i20 = p.space.index({2, 0}), i02 = p.space.index({0, 2});
    CHECK(std::abs(q.psi(i20) - std::polar(1.0 / std::sqrt(2.0), -theta)) < 1e-14);
    CHECK(std::abs(q.psi(i02) - std::polar(1.0 / std::sqrt(2.0), theta)) < 1e-14);
    CHECK(q.psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(encode(p, gen, RVector::Zero(2)));
}

TEST_CASE("two-qubit encoding phase pattern") {
    const double gamma = 0.4, t1 = 0.3, t2 = -0.8;
    const ProbeState p = make_qubit_network(gamma, 2);
    RVector theta(2);
    theta << t1, t2;
    const ProbeState q = encode(p, qubit_network_generators(2), theta);
    const double n = 1.0 / std::sqrt(2.0 * (1.0 + gamma * gamma));
    CVector expected(4);
    expected << std::polar(n, -(t1 + t2) / 2), std::polar(n * gamma, -(t1 - t2) / 2),
        std::polar(n * gamma, (t1 - t2) / 2), std::polar(n, (t1 + t2) / 2);
    CHECK(max_abs(q.psi - expected) < 1e-14);
}

TEST_CASE("lossy two-photon state") {
    const std::vector<cplx> c = {3.0 / std::sqrt(19.0), 0.0, std::sqrt(10.0 / 19.0)};
    const ProbeState in = make_two_photon_state(c);
    const double phi = 0.7;
    const ProbeState out = lossy_encode(in, 0.9, phi);
    const ModeSpace& sp = out.space;
    CMatrix expected = CMatrix::Zero(sp.dim(), sp.dim());
    const Index i00 = sp.index({0, 0}), i02 = sp.index({0, 2}), i10 = sp.index({1, 0}), i20 = sp.index({2, 0});
    expected(i00, i00) = 1.0;
    expected(i02, i02) = 90.0;
    expected(i10, i10) = 18.0;
    expected(i20, i20) = 81.0;
    expected(i20, i02) = std::polar(27.0 * std::sqrt(10.0), -2.0 * phi);
    expected(i02, i20) = std::conj(expected(i20, i02));
    expected /= 190.0;
    CHECK(max_abs(out.density() - expected) < 1e-14);
    CHECK_THROWS(lossy_encode(in, 0.0, phi));
    CHECK_THROWS(lossy_encode(in, 1.2, phi));
}

TEST_CASE("loss preserves the trace and no loss gives the unitary image") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<cplx> c = {cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng))};
        const ProbeState in = make_two_photon_state(c);
        const double eta = 0.05 + 0.95 * u(rng), phi = 2.0 * kPi * u(rng);
        const CMatrix rho = lossy_encode(in, eta, phi).density();
        CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
        CHECK(is_hermitian(rho, 1e-12));
        CHECK(hermitian_eig(rho, 1e-9).values.minCoeff() >= -1e-10);

        const CMatrix pure = lossy_encode(in, 1.0, phi).density();
        CHECK(std::abs((pure * pure).trace() - 1.0) < 1e-10);
        const ProbeState unitary = encode(in, number_generators(in.space, {0}), RVector::Constant(1, phi));
        CHECK(trace_distance(pure, unitary.density()) <= 1e-8);
    }
}

TEST_CASE("qubit network family") {
    const ProbeState sep = make_qubit_network(1.0, 2);
    CHECK(max_abs(sep.psi - CVector::Constant(4, 0.5)) < 1e-15);

    for (double gamma : {0.0, 0.3, 1.0, 2.5})
        for (int d : {2, 3, 4}) {
            const ProbeState p = make_qubit_network(gamma, d);
            CHECK(p.psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
            const RMatrix f = qfim(p, qubit_network_generators(d));
            const double j = f(0, 1) / f(0, 0);
            const double expected = (1.0 - gamma * gamma) / (1.0 + (std::pow(2.0, d - 1) - 1.0) * gamma * gamma);
            CHECK(j == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
            CHECK(qubit_network_correlation(gamma, d) == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
        }
    CHECK(qubit_network_correlation(0.0, 2) == 1.0);
    CHECK_THROWS(make_qubit_network(0.5, 1));
}

TEST_CASE("imaging probes") {
    const ProbeState g = make_imaging_global(2, 2, 1.0);
    const ModeSpace& sp = g.space;
    CHECK(sp.modes == 3);
    CVector expected = CVector::Zero(sp.dim());
    for (auto occ : {std::vector<int>{2, 0, 0}, {0, 2, 0}, {0, 0, 2}}) expected(sp.index(occ)) = 1.0 / std::sqrt(3.0);
    CHECK(max_abs(g.psi - expected) < 1e-15);
    CHECK(mean_quanta(g) == doctest::Approx(2.0));
    CHECK_THROWS(make_imaging_global(2, 0, 1.0));

    const int d = 2, big_n = 3;
    const double nbar = 2.0;
    const ProbeState l = make_imaging_local(d, nbar, big_n);
    CHECK(mean_quanta(l) == doctest::Approx(nbar).epsilon(1e-12));
    const double amp = std::sqrt(nbar / (big_n * (d + 1.0)));
    CHECK(std::abs(l.psi(l.space.index({big_n, 0, 0}))) == doctest::Approx(amp * (1 - amp * amp)).epsilon(1e-12));
    CHECK(std::abs(l.psi(l.space.index({big_n, big_n, big_n}))) == doctest::Approx(std::pow(amp, 3)).epsilon(1e-12));
    CHECK_THROWS(make_imaging_local(2, 20.0, 2));
}

TEST_CASE("generators") {
    const ModeSpace sp(4, 2);
    const Generator jz = interferometer_generator(sp);
    CHECK(jz.is_diagonal());
    CHECK(max_abs(jz.op(0) - jordan_schwinger(sp, Axis::z)) < 1e-15);
    const Generator from_ops = Generator::from_operators({jordan_schwinger(sp, Axis::z)});
    CHECK(from_ops.is_diagonal());
    CHECK_THROWS(Generator::from_operators({jordan_schwinger(sp, Axis::x), jordan_schwinger(sp, Axis::z)}));
    CHECK_THROWS(number_generators(sp, {2}));

    const SectorDecomposition sec = spectral_sectors(number_generators(sp, {0, 1}));
    CHECK(sec.sectors() == sp.dim());
    const SectorDecomposition one = spectral_sectors(jz);
    CHECK(one.sectors() == 7);
}
