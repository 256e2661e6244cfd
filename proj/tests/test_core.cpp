#include <cmath>
#include <numbers>

#include "helpers.hpp"

using namespace graphdsp;
using gt::random_matrix;
using gt::random_vector;
using HC = std::vector<HermiteConstraint>;

// ---------------------------------------------------------------- graph-core

TEST(BuildGraph, EmptyEdgeListGivesZeroAdjacency) {
    const Graph g = build_graph(2, {});
    EXPECT_EQ(g.size(), 2u);
    EXPECT_TRUE(g.dense().isZero(0.0));
}

TEST(BuildGraph, DirectedCycleHasUnitSubdiagonal) {
    const Graph g = build_graph(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
    const CMatrix a = g.dense();
    for (int n = 0; n < 4; ++n)
        for (int m = 0; m < 4; ++m) EXPECT_EQ(a(n, m), cplx((n - m + 4) % 4 == 1 ? 1.0 : 0.0)) << n << "," << m;
    EXPECT_EQ(g.fingerprint(), cycle_graph(4).fingerprint());
}

TEST(BuildGraph, RejectsDuplicateEdges) {
    EXPECT_THROW(build_graph(2, {{0, 1, 1.0}, {0, 1, 2.0}}), ValidationError);
}

TEST(BuildGraph, RejectsOutOfRangeAndNonFinite) {
    EXPECT_THROW(build_graph(2, {{0, 2, 1.0}}), ValidationError);
    EXPECT_THROW(build_graph(2, {{0, 1, cplx(NAN, 0.0)}}), ValidationError);
    EXPECT_THROW(build_graph(2, {{0, 1, cplx(0.0, INFINITY)}}), ValidationError);
    EXPECT_THROW(build_graph(0, {}), ValidationError);
}

TEST(BuildGraph, NeighborhoodMatchesAdjacency) {
    const Graph g = build_graph(3, {{0, 2, 1.0}, {1, 2, -0.5}, {2, 0, cplx(0, 1)}});
    EXPECT_EQ(g.neighborhood(2), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(g.neighborhood(0), (std::vector<std::size_t>{2}));
    EXPECT_TRUE(g.neighborhood(1).empty());
}

TEST(BuildGraph, SparseStorageAgreesWithDense) {
    Rng rng(3);
    std::vector<Edge> edges;
    for (std::size_t m = 0; m < 30; ++m)
        for (std::size_t n = 0; n < 30; ++n)
            if (rng.bernoulli(0.2)) edges.push_back({m, n, cplx(rng.normal(), rng.normal())});
    const Graph dense(30, edges);
    const Graph sparse(30, edges, GraphOptions{10});
    ASSERT_TRUE(dense.is_dense());
    ASSERT_FALSE(sparse.is_dense());
    const CVector x = random_vector(rng, 30);
    EXPECT_LT((dense.shift(x) - sparse.shift(x)).norm(), 1e-12 * x.norm());
    EXPECT_EQ(dense.fingerprint(), sparse.fingerprint());
    for (std::size_t n = 0; n < 30; ++n) EXPECT_EQ(dense.neighborhood(n), sparse.neighborhood(n));
}

TEST(GraphShift, CycleDelaysTheSignal) {
    const Graph g = cycle_graph(4);
    const GraphSignal s(g, CVector{{1.0, 2.0, 3.0, 4.0}});
    const CVector out = graph_shift(g, s).values();
    EXPECT_EQ(out, (CVector{{4.0, 1.0, 2.0, 3.0}}));
}

TEST(GraphShift, ZeroSignalMapsToZero) {
    Rng rng(1);
    const Graph g = Graph::from_adjacency(random_matrix(rng, 5));
    EXPECT_TRUE(graph_shift(g, GraphSignal(g, CVector::Zero(5))).values().isZero(0.0));
}

TEST(GraphShift, ComplexTwoNodeExample) {
    // A[0,1] = i (edge 1 -> 0), A[1,0] = -1 (edge 0 -> 1)
    const Graph g = build_graph(2, {{1, 0, cplx(0, 1)}, {0, 1, -1.0}});
    const CVector out = graph_shift(g, GraphSignal(g, CVector{{1.0, 1.0}})).values();
    EXPECT_EQ(out(0), cplx(0, 1));
    EXPECT_EQ(out(1), cplx(-1, 0));
}

TEST(GraphShift, RejectsLengthMismatchAndForeignSignal) {
    const Graph g = cycle_graph(4);
    EXPECT_THROW(graph_shift(g, GraphSignal(CVector::Zero(3))), ValidationError);
    const GraphSignal other(cycle_graph(5), CVector::Zero(5));
    EXPECT_THROW(graph_shift(g, other), ValidationError);
    const Graph g2 = build_graph(4, {{0, 1, 2.0}});
    EXPECT_THROW(graph_shift(g2, GraphSignal(g, CVector::Zero(4))), ValidationError);
}

TEST(GraphShift, IsLinear) {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = Graph::from_adjacency(random_matrix(rng, 8));
        const CVector s1 = random_vector(rng, 8), s2 = random_vector(rng, 8);
        const cplx a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
        const CVector lhs = g.shift(a * s1 + b * s2);
        const CVector rhs = a * g.shift(s1) + b * g.shift(s2);
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1.0, rhs.norm()));
    }
}

TEST(GraphShift, CycleShiftedNTimesIsIdentity) {
    Rng rng(11);
    for (std::size_t n : {3u, 8u, 17u}) {
        const Graph g = cycle_graph(n);
        const CVector s = random_vector(rng, static_cast<Eigen::Index>(n));
        CVector x = s;
        for (std::size_t k = 0; k < n; ++k) x = g.shift(x);
        EXPECT_EQ(x, s);
    }
}

TEST(KnnGraph, TwoPointsGetUnitWeights) {
    const std::vector<Point> pts{{0.0, 0.0}, {0.7, 0.0}};
    const CMatrix a = knn_similarity_graph(pts, 1).dense();
    EXPECT_NEAR(a(0, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(a(1, 0).real(), 1.0, 1e-15);
    EXPECT_EQ(a(0, 0), cplx(0.0));
}

TEST(KnnGraph, CollinearPointsByHand) {
    const std::vector<Point> pts{{0.0}, {1.0}, {10.0}};
    const CMatrix a = knn_similarity_graph(pts, 1).dense();
    // Neighborhoods after union: 0:{1}, 1:{0,2}, 2:{1}.
    const double e1 = std::exp(-1.0), e81 = std::exp(-81.0);
    const double z0 = e1, z1 = e1 + e81, z2 = e81;
    EXPECT_NEAR(a(0, 1).real(), e1 / std::sqrt(z0 * z1), 1e-14);
    EXPECT_NEAR(a(1, 0).real(), e1 / std::sqrt(z1 * z0), 1e-14);
    EXPECT_NEAR(a(1, 2).real(), e81 / std::sqrt(z1 * z2), 1e-14);
    EXPECT_NEAR(a(2, 1).real(), e81 / std::sqrt(z2 * z1), 1e-14);
    EXPECT_EQ(a(0, 2), cplx(0.0));
    EXPECT_EQ(a(2, 0), cplx(0.0));
}

TEST(KnnGraph, SymmetricWithEntriesInUnitInterval) {
    Rng rng(5);
    std::vector<Point> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.uniform(0, 3), rng.uniform(0, 3)});
    const Graph g = knn_similarity_graph(pts, 5);
    const CMatrix a = g.dense();
    EXPECT_EQ(a, a.transpose());
    for (const auto& e : g.edges()) {
        EXPECT_GT(e.weight.real(), 0.0);
        EXPECT_LE(e.weight.real(), 1.0);
        EXPECT_EQ(e.weight.imag(), 0.0);
    }
    for (std::size_t n = 0; n < 60; ++n) EXPECT_GE(g.neighborhood(n).size(), 5u);
}

TEST(KnnGraph, DistanceTiesGoToLowerIndex) {
    // Node 1 is equidistant from nodes 0 and 2 and picks 0; node 2 still links back.
    const std::vector<Point> pts{{0.0}, {1.0}, {2.0}, {10.0}};
    const Graph g = knn_similarity_graph(pts, 1);
    EXPECT_NE(g.weight(0, 1), cplx(0.0));
    const auto nb = g.neighborhood(1);
    EXPECT_EQ(nb, (std::vector<std::size_t>{0, 2}));
}

TEST(KnnGraph, RejectsTooFewPoints) {
    const std::vector<Point> pts{{0.0}, {1.0}};
    EXPECT_THROW(knn_similarity_graph(pts, 2), ValidationError);
    EXPECT_THROW(knn_similarity_graph(pts, 0), ValidationError);
}

TEST(CallGraph, RowProportions) {
    RMatrix t(3, 3);
    t << 0, 30, 10, 0, 0, 0, 5, 5, 0;
    const CMatrix a = normalize_call_graph(t).dense();
    EXPECT_EQ(a(0, 0), cplx(0.0));
    EXPECT_EQ(a(0, 1), cplx(0.75));
    EXPECT_EQ(a(0, 2), cplx(0.25));
    EXPECT_TRUE(a.row(1).isZero(0.0));
}

TEST(CallGraph, RandomRowsSumToOne) {
    Rng rng(9);
    RMatrix t = RMatrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j && i != 3) t(i, j) = rng.exponential(4.0);
    const CMatrix a = normalize_call_graph(t).dense();
    for (int i = 0; i < 5; ++i) {
        const double sum = a.row(i).sum().real();
        if (i == 3) EXPECT_EQ(sum, 0.0);
        else EXPECT_NEAR(sum, 1.0, 1e-15);
    }
}

TEST(CallGraph, RejectsNegativeDurations) {
    RMatrix t = RMatrix::Zero(2, 2);
    t(0, 1) = -1.0;
    EXPECT_THROW(normalize_call_graph(t), ValidationError);
}

// ---------------------------------------------------------------- polynomials

TEST(PolyEval, ValuesAndDerivatives) {
    const Polynomial p{0.0, 0.0, 1.0};
    EXPECT_EQ(poly_eval(p, 3.0, 0), cplx(9.0));
    EXPECT_EQ(poly_eval(p, 3.0, 1), cplx(6.0));
    EXPECT_EQ(poly_eval(p, 3.0, 2), cplx(2.0));
    EXPECT_EQ(poly_eval(p, 3.0, 3), cplx(0.0));
}

TEST(PolyEval, DerivativeMatchesCoefficientDifferentiation) {
    Rng rng(2);
    const Polynomial p = gt::random_poly(rng, 6);
    const cplx x(0.3, -0.7);
    for (std::size_t k = 0; k < 8; ++k) {
        // Oracle: differentiate term by term as a power series.
        cplx ref = 0.0;
        for (std::size_t i = k; i < p.size(); ++i) {
            double f = 1.0;
            for (std::size_t j = i - k + 1; j <= i; ++j) f *= static_cast<double>(j);
            ref += p[i] * f * std::pow(x, static_cast<double>(i - k));
        }
        EXPECT_LT(std::abs(p(x, k) - ref), 1e-10 * std::max(1.0, std::abs(ref))) << k;
        EXPECT_LT(std::abs(p.derivative(k)(x) - ref), 1e-10 * std::max(1.0, std::abs(ref))) << k;
    }
}

TEST(PolyModMul, Examples) {
    const Polynomial x = Polynomial::x();
    const Polynomial m{-1.0, 0.0, 1.0};
    EXPECT_EQ(poly_mod_mul(x, x, m), Polynomial{1.0});
    const Polynomial b{2.0, -1.0, 0.5, 3.0};
    EXPECT_EQ(poly_mod_mul(Polynomial{1.0}, b, m), b % m);
    const Polynomial r = poly_mod_mul(Polynomial{1.0, 1.0}, Polynomial{2.0, 1.0}, Polynomial{1.0, 0.0, 1.0});
    EXPECT_EQ(r, (Polynomial{1.0, 3.0}));
    EXPECT_THROW(poly_mod_mul(x, x, Polynomial{}), ValidationError);
}

TEST(PolyDivision, QuotientTimesDivisorPlusRemainder) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const Polynomial a = gt::random_poly(rng, 7), m = gt::random_poly(rng, 3);
        const auto [q, r] = Polynomial::divmod(a, m);
        EXPECT_LT(r.degree(), m.degree());
        EXPECT_LT((q * m + r - a).norm(), 1e-10 * a.norm());
    }
}

TEST(CharPoly, Examples) {
    EXPECT_EQ(char_poly(CMatrix::Zero(2, 2)), (Polynomial{0.0, 0.0, 1.0}));
    const CMatrix c4 = cycle_graph(4).dense();
    const Polynomial p = char_poly(c4);
    const Polynomial expect{-1.0, 0.0, 0.0, 0.0, 1.0};
    EXPECT_LT((p - expect).norm(), 1e-12);
    EXPECT_EQ(char_poly(c4, Backend::exact), expect);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    EXPECT_LT((char_poly(d) - Polynomial{2.0, -3.0, 1.0}).norm(), 1e-14);
    EXPECT_EQ(char_poly(d, Backend::exact), (Polynomial{2.0, -3.0, 1.0}));
}

TEST(CharPoly, ExactMatchesNumericOnIntegerMatrices) {
    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix a(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) a(i, j) = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
        const Polynomial pe = char_poly(a, Backend::exact), pn = char_poly(a);
        EXPECT_LT((pe - pn).norm(), 1e-8 * std::max(1.0, pe.norm()));
    }
}

TEST(CharPoly, CayleyHamilton) {
    Rng rng(12);
    for (Eigen::Index n = 1; n <= 8; ++n) {
        const CMatrix a = random_matrix(rng, n);
        const double scale = std::pow(std::max(1.0, a.norm()), static_cast<double>(n));
        EXPECT_LT(gt::poly_of_matrix(char_poly(a), a).norm(), 1e-8 * scale) << n;
    }
}

TEST(CharPoly, RejectsNonFinite) {
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 1) = NAN;
    EXPECT_THROW(char_poly(a), ValidationError);
}

TEST(MinPoly, SingleJordanBlock) {
    const cplx lambda(0.5, 2.0);
    const SpectralBasis b({lambda}, {{2}}, CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), Backend::numeric, 0);
    const Polynomial expect = Polynomial::from_roots({{lambda, 2}});
    EXPECT_LT((min_poly(b) - expect).norm(), 1e-15);
}

TEST(MinPoly, IdentityHasDegreeOne) {
    const SpectralBasis b = jordan_decompose(CMatrix(CMatrix::Identity(2, 2)));
    EXPECT_EQ(b.chains(), (std::vector<std::vector<std::size_t>>{{1, 1}}));
    EXPECT_LT((min_poly(b) - Polynomial{-1.0, 1.0}).norm(), 1e-15);
    EXPECT_NE(min_poly(b).degree(), char_poly(b).degree());
}

TEST(MinPoly, DistinctEigenvaluesGiveCharPoly) {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        const CMatrix a = random_matrix(rng, 6);
        const SpectralBasis b = jordan_decompose(a);
        const Polynomial p = char_poly(a);
        EXPECT_LT((min_poly(b) - p).norm(), 1e-9 * p.norm());
    }
}

TEST(MinPoly, DividesCharPolyAndAnnihilates) {
    Rng rng(14);
    const CMatrix v0 = gt::unimodular(rng, 6);
    const CMatrix j0 = gt::jordan_matrix({{1.0, 2}, {1.0, 1}, {-2.0, 3}});
    const CMatrix a = v0 * j0 * v0.inverse();
    const SpectralBasis b = jordan_decompose(a, gt::exact_opts());
    const Polynomial m = min_poly(b), p = char_poly(b);
    EXPECT_EQ(m.degree(), 5);
    EXPECT_LT((p % m).norm(), 1e-10);
    EXPECT_EQ(min_poly_exact(b), (ExactPolynomial::from_roots({{GaussRational(-2), 3}, {GaussRational(1), 2}})));
    EXPECT_LT(gt::poly_of_matrix(m, a).norm(), 1e-8 * std::pow(a.norm(), 5));
}

TEST(JordanBlockEval, Examples) {
    const cplx lambda(1.5, -0.5);
    const CMatrix sq = eval_on_jordan_block(Polynomial{0.0, 0.0, 1.0}, lambda, 2);
    EXPECT_LT(std::abs(sq(0, 0) - lambda * lambda), 1e-15);
    EXPECT_LT(std::abs(sq(0, 1) - 2.0 * lambda), 1e-15);
    EXPECT_EQ(sq(1, 0), cplx(0.0));
    EXPECT_LT(std::abs(sq(1, 1) - lambda * lambda), 1e-15);

    EXPECT_EQ(eval_on_jordan_block(Polynomial{1.0}, 3.0, 4), CMatrix(CMatrix::Identity(4, 4)));

    const CMatrix j3 = gt::jordan_matrix({{2.0, 3}});
    const CMatrix cube = j3 * j3 * j3;
    EXPECT_EQ(eval_on_jordan_block(Polynomial{0.0, 0.0, 0.0, 1.0}, 2.0, 3), cube);
    EXPECT_EQ(cube(0, 1), cplx(12.0));
    EXPECT_EQ(cube(0, 2), cplx(6.0));
    EXPECT_THROW(eval_on_jordan_block(Polynomial{1.0}, 0.0, 0), ValidationError);
}

TEST(JordanBlockEval, IsMultiplicative) {
    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const Polynomial h = gt::random_poly(rng, 4), g = gt::random_poly(rng, 3);
        const cplx lambda(rng.normal(), rng.normal());
        const std::size_t r = 1 + rng.below(5);
        const CMatrix lhs = eval_on_jordan_block(h, lambda, r) * eval_on_jordan_block(g, lambda, r);
        const CMatrix rhs = eval_on_jordan_block(h * g, lambda, r);
        EXPECT_LT((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
        // Oracle: the polynomial applied to an explicit Jordan block.
        const CMatrix jb = gt::jordan_matrix({{lambda, static_cast<int>(r)}});
        EXPECT_LT((gt::poly_of_matrix(h, jb) - eval_on_jordan_block(h, lambda, r)).norm(),
                  1e-10 * std::max(1.0, gt::poly_of_matrix(h, jb).norm()));
    }
}

TEST(Hermite, Examples) {
    const Polynomial p1 = hermite_interpolate(HC{{1.0, {1.0, 1.0}}});
    EXPECT_LT((p1 - Polynomial::x()).norm(), 1e-12);
    const Polynomial p2 = hermite_interpolate(HC{{0.0, {1.0}}, {1.0, {1.0}}});
    EXPECT_LT((p2 - Polynomial{1.0}).norm(), 1e-12);
    EXPECT_EQ(p2.degree(), 0);
    const Polynomial p3 = hermite_interpolate(HC{{1.0, {1.0}}, {2.0, {0.5}}});
    EXPECT_LT((p3 - Polynomial{1.5, -0.5}).norm(), 1e-12);
}

TEST(Hermite, ExactExamples) {
    using G = GaussRational;
    const ExactPolynomial p = hermite_interpolate(std::vector<ExactHermiteConstraint>{{G(1), {G(1)}}, {G(2), {G(Rational(1, 2))}}});
    EXPECT_EQ(p, (ExactPolynomial{G(Rational(3, 2)), G(Rational(-1, 2))}));
}

TEST(Hermite, SatisfiesEveryConstraint) {
    Rng rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<HermiteConstraint> cons;
        const std::size_t k = 1 + rng.below(4);
        for (std::size_t i = 0; i < k; ++i) {
            HermiteConstraint c{cplx(rng.normal(), rng.normal()), {}};
            const std::size_t r = 1 + rng.below(3);
            for (std::size_t j = 0; j < r; ++j) c.values.emplace_back(rng.normal(), rng.normal());
            cons.push_back(c);
        }
        const Polynomial p = hermite_interpolate(cons);
        EXPECT_LT(p.degree(), static_cast<int>(detail::total_constraints(cons)));
        for (const auto& c : cons)
            for (std::size_t j = 0; j < c.values.size(); ++j)
                EXPECT_LT(std::abs(p(c.point, j) - c.values[j]), 1e-9 * (1.0 + std::abs(c.values[j])));
    }
}

TEST(Hermite, RejectsRepeatedPointsAndIllConditioning) {
    EXPECT_THROW(hermite_interpolate(HC{{1.0, {1.0}}, {1.0, {2.0}}}), ValidationError);
    std::vector<HermiteConstraint> cons;
    for (int i = 0; i < 40; ++i) cons.push_back({1.0 + 1e-3 * i, {static_cast<double>(i % 2)}});
    EXPECT_THROW(hermite_interpolate(cons), InterpolationError);
    EXPECT_THROW(hermite_interpolate(std::vector<HermiteConstraint>{}), ValidationError);
}

TEST(Exact, RationalizeRecognizesSimpleFractions) {
    EXPECT_EQ(*exact::rationalize(0.75), Rational(3, 4));
    EXPECT_EQ(*exact::rationalize(-1.0 / 3.0), Rational(-1, 3));
    EXPECT_EQ(*exact::rationalize(0.0), Rational(0));
    EXPECT_EQ(*exact::rationalize(cplx(2.5, -0.2)), GaussRational(Rational(5, 2), Rational(-1, 5)));
    EXPECT_FALSE(exact::rationalize(std::numbers::pi, 1e-15, BigInt(1000)).has_value());
}

TEST(Exact, NullspaceAndInverse) {
    exact::Matrix m(2, 3);
    m(0, 0) = 1;
    m(0, 1) = 2;
    m(0, 2) = 3;
    m(1, 0) = 2;
    m(1, 1) = 4;
    m(1, 2) = 6;
    const auto ns = exact::nullspace(m);
    ASSERT_EQ(ns.size(), 2u);
    for (const auto& v : ns)
        for (const auto& x : m * v) EXPECT_TRUE(x.is_zero());
    exact::Matrix a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = GaussRational(Rational(0), Rational(1));
    a(1, 0) = 1;
    a(1, 1) = 1;
    EXPECT_EQ(a * exact::inverse(a), exact::Matrix::identity(2));
    exact::Matrix s(2, 2);
    s(0, 0) = 1;
    s(0, 1) = 2;
    s(1, 0) = 2;
    s(1, 1) = 4;
    EXPECT_THROW(exact::inverse(s), NumericalError);
}
