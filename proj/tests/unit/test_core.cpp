#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdist/distributions.hpp"
#include "sdist/error.hpp"
#include "sdist/io.hpp"
#include "sdist/linalg.hpp"
#include "sdist/rng.hpp"
#include "sdist/sample_set.hpp"

namespace sdist {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitChildrenDiffer) {
  const Rng root(9);
  Rng c0 = root.split(0), c1 = root.split(1);
  EXPECT_NE(c0.next_u64(), c1.next_u64());
  Rng again = root.split(0);
  Rng c0b = root.split(0);
  EXPECT_EQ(again.next_u64(), c0b.next_u64());
}

TEST(Rng, UniformRangeAndBelow) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  std::vector<double> v(200000);
  for (auto& x : v) x = rng.normal();
  const auto s = testing::summarize(v);
  EXPECT_NEAR(s.mean, 0.0, 0.01);
  EXPECT_NEAR(s.sd, 1.0, 0.01);
}

TEST(SampleSet, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(SampleSet(Matrix(0, 2)), std::invalid_argument);
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = NAN;
  EXPECT_THROW(SampleSet{m}, std::invalid_argument);
}

TEST(SampleSet, ColumnAccessAndSelect) {
  Matrix m(3, 2);
  m << 1, 2, 3, 4, 5, 6;
  const SampleSet s(m);
  EXPECT_EQ(s.column(1), (std::vector<double>{2, 4, 6}));
  EXPECT_DOUBLE_EQ(s.column_means()(0), 3.0);
  const auto sub = select_rows(s, {2, 0});
  EXPECT_EQ(sub.row(0)(0), 5.0);
  EXPECT_EQ(sub.row(1)(1), 2.0);
  EXPECT_THROW(select_rows(s, {3}), std::out_of_range);
}

TEST(SampleSet, ShapeChecks) {
  const SampleSet a(Matrix::Zero(3, 2)), b(Matrix::Zero(3, 3)), c(Matrix::Zero(4, 2));
  EXPECT_THROW(require_same_dimension(a, b, "op"), std::invalid_argument);
  EXPECT_NO_THROW(require_same_dimension(a, c, "op"));
  EXPECT_THROW(require_same_size(a, c, "op"), std::invalid_argument);
}

TEST(Distributions, StandardNormalMean) {
  Rng rng(11);
  const auto s = sample(GaussianModel::standard(3), 10000, rng);
  const Vector mu = s.column_means();
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_LT(std::abs(mu(j)), 4.0 / std::sqrt(10000.0));
}

TEST(Distributions, EmpiricalCovariance) {
  Rng rng(12);
  Vector mean(2);
  mean << 1, 1;
  const auto s = sample(GaussianModel(mean, SquareMatrix::Identity(2, 2)), 50000, rng);
  const Matrix centered = s.data().rowwise() - s.column_means().transpose();
  const SquareMatrix cov = centered.transpose() * centered / (50000.0 - 1.0);
  EXPECT_LT((cov - SquareMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Distributions, DegenerateMixtureWeights) {
  Vector a(1), b(1);
  a << -50;
  b << 50;
  const auto mix = make_mixture({1.0, 0.0}, {a, b}, {SquareMatrix::Identity(1, 1), SquareMatrix::Identity(1, 1)});
  Rng rng(3);
  const auto s = sample(mix, 2000, rng);
  EXPECT_LT(s.data().maxCoeff(), 0.0);
}

TEST(Distributions, SamplingIsDeterministic) {
  const auto mix = canonical_mog2d();
  Rng a(99), b(99);
  EXPECT_EQ(sample(mix, 500, a), sample(mix, 500, b));
}

TEST(Distributions, LogDensityClosedForm) {
  const auto g = GaussianModel::standard(1);
  Vector x(1);
  x << 0;
  const double base = -0.5 * std::log(2.0 * M_PI);
  EXPECT_NEAR(g.log_density(x), base, 1e-14);
  x << 2;
  EXPECT_NEAR(g.log_density(x), base - 2.0, 1e-14);
}

TEST(Distributions, MixtureOfIdenticalComponents) {
  Vector m(2);
  m << 0.3, -1;
  SquareMatrix c(2, 2);
  c << 2, 0.5, 0.5, 1;
  const GaussianModel g(m, c);
  const auto mix = make_mixture({0.5, 0.5}, {m, m}, {c, c});
  Vector x(2);
  x << 1.2, 0.4;
  EXPECT_NEAR(mix.log_density(x), g.log_density(x), 1e-12);
}

TEST(Distributions, SingularCovarianceRejectedByDensity) {
  SquareMatrix c = SquareMatrix::Zero(2, 2);
  c(0, 0) = 1;
  const GaussianModel g(Vector::Zero(2), c);
  EXPECT_TRUE(g.singular());
  EXPECT_THROW(g.log_density(Vector::Zero(2)), NumericalError);
}

TEST(Distributions, NonPsdCovarianceNamesComponent) {
  SquareMatrix bad(2, 2);
  bad << 1, 2, 2, 1;
  try {
    make_mixture({0.5, 0.5}, {Vector::Zero(2), Vector::Zero(2)}, {SquareMatrix::Identity(2, 2), bad});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("component 1"), std::string::npos);
  }
}

TEST(Distributions, MixtureMoments) {
  const auto mix = canonical_mog2d();
  Rng rng(21);
  const auto s = sample(mix, 200000, rng);
  EXPECT_LT((s.column_means() - mix.mean()).cwiseAbs().maxCoeff(), 0.03);
  const auto g = moment_matched_gaussian(mix);
  EXPECT_LT((g.covariance() - mix.covariance()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Linalg, IdentityAndDiagonal) {
  const auto e = linalg::eigh(SquareMatrix::Identity(4, 4));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), 1.0, 1e-14);
  SquareMatrix d = SquareMatrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 1;
  const auto f = linalg::eigh(d);
  EXPECT_NEAR(f.values(0), 1.0, 1e-14);
  EXPECT_NEAR(f.values(1), 4.0, 1e-14);
  EXPECT_NEAR(std::abs(f.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(f.vectors(0, 1)), 1.0, 1e-14);
}

TEST(Linalg, MatchesJacobiOracle) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = standard_normal_matrix(5, 5, rng);
    const SquareMatrix m = a + a.transpose();
    const auto e = linalg::eigh(m);
    const auto ref = testing::jacobi_eigenvalues(m);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e.values(static_cast<Eigen::Index>(i)), ref[i], 1e-8);
    const SquareMatrix recon = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((recon - m).cwiseAbs().maxCoeff(), 1e-8 * m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 1; i < 5; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(Linalg, PsdRepair) {
  SquareMatrix m(2, 2);
  m << 1, 1, 1, 1 - 1e-13;
  const SquareMatrix r = linalg::repair_psd(m);
  EXPECT_GE(linalg::eigh(r).values(0), -1e-15);
  SquareMatrix bad(2, 2);
  bad << 1, 0, 0, -0.1;
  EXPECT_THROW(linalg::repair_psd(bad), NumericalError);
}

TEST(Linalg, SqrtPsdSquaresBack) {
  Rng rng(4);
  const Matrix a = standard_normal_matrix(6, 4, rng);
  const SquareMatrix m = a.transpose() * a;
  const SquareMatrix s = linalg::sqrt_psd(m);
  EXPECT_LT((s * s - m).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Linalg, CholeskyOfSemidefinite) {
  SquareMatrix m(2, 2);
  m << 1, 1, 1, 1;
  const SquareMatrix l = linalg::cholesky_psd(m);
  EXPECT_LT((l * l.transpose() - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Io, CsvRoundTrip) {
  Matrix m(3, 2);
  m << 0.1, -2.5, 1e-300, 3, 7.25, 1.0 / 3.0;
  std::stringstream ss;
  io::write_samples_csv(SampleSet(m), ss);
  EXPECT_EQ(io::read_samples_csv(ss).data(), m);
}

TEST(Io, RaggedRowNamesRow) {
  std::stringstream ss("1,2\n3,4,5\n");
  try {
    io::read_samples_csv(ss);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
}

TEST(Io, NonNumericCellLocation) {
  std::stringstream ss("x0,x1\n1,2\n3,abc\n");
  try {
    io::read_samples_csv(ss);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(Io, EmptyAndMinimal) {
  std::stringstream empty("");
  EXPECT_THROW(io::read_samples_csv(empty), ParseError);
  std::stringstream one("0.5\n");
  const auto s = io::read_samples_csv(one);
  EXPECT_EQ(s.n(), 1u);
  EXPECT_EQ(s.d(), 1u);
  EXPECT_EQ(s.data()(0, 0), 0.5);
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 12345678.9}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(Io, ModelJsonRoundTrip) {
  const DistributionModel mix = canonical_mog2d();
  const auto back = io::model_from_json(io::model_to_json(mix));
  const auto& m = std::get<MixtureModel>(back);
  EXPECT_EQ(m.size(), std::get<MixtureModel>(mix).size());
  EXPECT_LT((m.mean() - std::get<MixtureModel>(mix).mean()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(io::model_from_json(R"({"type":"gaussian"})"), std::invalid_argument);
}

}  // namespace
}  // namespace sdist
