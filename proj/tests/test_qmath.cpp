#include <doctest.h>

#include <random>

#include "convert.hpp"
#include "qcap/qmath.hpp"

using namespace qcap;

namespace {

DensityMatrix bell_phi_plus() { return density_from(oracle::bell_projector()); }

DensityMatrix qubit_diag(double p0, double p1) {
  DensityMatrix rho{1, ComplexMatrix(2, 2)};
  rho.mat(0, 0) = p0;
  rho.mat(1, 1) = p1;
  return rho;
}

}  // namespace

TEST_SUITE_BEGIN("qmath");

TEST_CASE("tensor product basics") {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  const ComplexMatrix i4 = tensor_product(i2, i2);
  CHECK(i4.rows == 4);
  CHECK(max_abs(i4 - ComplexMatrix::identity(4)) == doctest::Approx(0.0));

  // |0><0| (x) |1><1| = diag(0,1,0,0)
  ComplexMatrix p0(2, 2), p1(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const ComplexMatrix prod = tensor_product(p0, p1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(prod(i, j) - ((i == 1 && j == 1) ? cplx{1.0} : cplx{})) < 1e-15);
}

TEST_CASE("X(x)X conjugation maps |00> to |11>") {
  // Oracle: direct 4x4 multiplication of explicitly written matrices.
  const oracle::Mat xx = oracle::kron(oracle::pauli_x(), oracle::pauli_x());
  oracle::Mat rho00 = oracle::zeros(4, 4);
  rho00[0][0] = 1.0;
  const oracle::Mat expect = oracle::mul(oracle::mul(xx, rho00), oracle::dagger(xx));

  const ComplexMatrix lib_xx = tensor_product(to_qcap(oracle::pauli_x()), to_qcap(oracle::pauli_x()));
  const ComplexMatrix got = lib_xx * to_qcap(rho00) * adjoint(lib_xx);
  CHECK(max_entry_diff(got, expect) < 1e-12);
  CHECK(std::abs(got(3, 3) - cplx{1.0}) < 1e-12);
}

TEST_CASE("partial trace of Bell pair and product states") {
  const DensityMatrix bell = bell_phi_plus();
  const DensityMatrix half = partial_trace(bell, {0});
  CHECK(half.n_qubits == 1);
  CHECK(std::abs(half.mat(0, 0) - cplx{0.5}) < 1e-12);
  CHECK(std::abs(half.mat(1, 1) - cplx{0.5}) < 1e-12);
  CHECK(std::abs(half.mat(0, 1)) < 1e-12);

  // |01><01| reduced to qubit 1 is |1><1|
  oracle::Mat rho01 = oracle::zeros(4, 4);
  rho01[1][1] = 1.0;
  const DensityMatrix q1 = partial_trace(density_from(rho01), {1});
  CHECK(std::abs(q1.mat(1, 1) - cplx{1.0}) < 1e-12);
  CHECK(std::abs(q1.mat(0, 0)) < 1e-12);
}

TEST_CASE("partial trace of dephased Bell pair is I/2 on both sides") {
  for (double p : {0.0, 0.1, 0.35, 0.5, 0.9, 1.0}) {
    // Oracle path: explicit Kraus conjugation on the 4x4 matrix.
    const oracle::Mat rho =
        oracle::apply_kraus(oracle::bell_projector(), oracle::phase_flip_kraus(p), 1, 2);
    const DensityMatrix joint = density_from(rho);
    for (std::size_t keep : {std::size_t{0}, std::size_t{1}}) {
      const DensityMatrix red = partial_trace(joint, {keep});
      CHECK(std::abs(red.mat(0, 0) - cplx{0.5}) < 1e-10);
      CHECK(std::abs(red.mat(1, 1) - cplx{0.5}) < 1e-10);
      CHECK(std::abs(red.mat(0, 1)) < 1e-10);
      CHECK(std::abs(trace(red.mat) - cplx{1.0}) < 1e-10);
    }
  }
}

TEST_CASE("partial trace errors") {
  const DensityMatrix bell = bell_phi_plus();
  CHECK_THROWS_AS((void)partial_trace(bell, {2}), std::out_of_range);
  CHECK_THROWS_AS((void)partial_trace(bell, std::span<const std::size_t>{}), std::invalid_argument);
}

TEST_CASE("eigenvalues: diagonal and Pauli X") {
  ComplexMatrix d(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = 0.7;
  const std::vector<double> ed = hermitian_eigenvalues(d);
  CHECK(ed[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ed[1] == doctest::Approx(0.7).epsilon(1e-12));

  const std::vector<double> ex = hermitian_eigenvalues(to_qcap(oracle::pauli_x()));
  CHECK(ex[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ex[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues of dephased Bell state are {0, 0, 0.1, 0.9}") {
  const oracle::Mat rho =
      oracle::apply_kraus(oracle::bell_projector(), oracle::phase_flip_kraus(0.1), 1, 2);
  const std::vector<double> eig = hermitian_eigenvalues(to_qcap(rho));
  CHECK(eig[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(eig[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(eig[2] - 0.1) < 1e-9);
  CHECK(std::abs(eig[3] - 0.9) < 1e-9);
}

TEST_CASE("eigenvalues reject non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;  // strictly upper triangular: not Hermitian
  CHECK_THROWS_AS((void)hermitian_eigenvalues(m), std::invalid_argument);
}

TEST_CASE("Jacobi matches determinant-bisection oracle on random Hermitian matrices") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {std::size_t{2}, std::size_t{4}, std::size_t{8}}) {
    for (int rep = 0; rep < 6; ++rep) {
      const oracle::Mat m = oracle::random_hermitian(n, rng);
      const std::vector<double> got = hermitian_eigenvalues(to_qcap(m));
      const std::vector<double> want = oracle::eigenvalues_bisection(m);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-8);

      double sum = 0.0, tr = 0.0;
      for (double e : got) sum += e;
      for (std::size_t i = 0; i < n; ++i) tr += m[i][i].real();
      CHECK(std::abs(sum - tr) < 1e-10);
    }
  }
}

TEST_CASE("entropy: pure, maximally mixed, binary spectrum") {
  CHECK(von_neumann_entropy(qubit_diag(1.0, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(qubit_diag(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
  // Binary entropy oracle computed right here.
  const double want = -(0.9 * std::log2(0.9) + 0.1 * std::log2(0.1));
  CHECK(std::abs(von_neumann_entropy(qubit_diag(0.9, 0.1)) - want) < 1e-9);
  CHECK(want == doctest::Approx(0.4690).epsilon(1e-4));
}

TEST_CASE("trace distance examples") {
  const DensityMatrix bell = bell_phi_plus();
  CHECK(trace_distance(bell, bell) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(qubit_diag(1.0, 0.0), qubit_diag(0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(qubit_diag(0.5, 0.5), qubit_diag(1.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS((void)trace_distance(bell, qubit_diag(1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("fidelity with pure states") {
  const std::vector<cplx> zero{1.0, 0.0}, one{0.0, 1.0};
  CHECK(fidelity_with_pure(qubit_diag(1.0, 0.0), zero) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_with_pure(qubit_diag(1.0, 0.0), one) == doctest::Approx(0.0).epsilon(1e-12));

  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<cplx> bell_vec{s, 0.0, 0.0, s};
  for (double p : {0.0, 0.25, 0.6, 1.0}) {
    const oracle::Mat rho =
        oracle::apply_kraus(oracle::bell_projector(), oracle::bit_flip_kraus(p), 1, 2);
    CHECK(std::abs(fidelity_with_pure(density_from(rho), bell_vec) - (1.0 - p)) < 1e-10);
  }

  std::vector<cplx> unnormalized{1.0, 1.0};
  CHECK_THROWS_AS((void)fidelity_with_pure(qubit_diag(1.0, 0.0), unnormalized), std::invalid_argument);
}

TEST_CASE("random density matrices: spectrum sums to one, entropy within range") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rep % 3;
    const DensityMatrix rho = density_from(oracle::random_density(std::size_t{1} << n, rng));
    const std::vector<double> eig = hermitian_eigenvalues(rho.mat);
    double sum = 0.0;
    for (double e : eig) sum += e;
    CHECK(std::abs(sum - 1.0) < 1e-9);
    const double s = von_neumann_entropy(rho);
    CHECK(s >= -1e-12);
    CHECK(s <= n + 1e-9);
    CHECK_NOTHROW(validate_density(rho, "random state"));
  }
}

TEST_CASE("partial trace inverts tensor product") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const oracle::Mat a = oracle::random_density(2, rng);
    const oracle::Mat b = oracle::random_density(4, rng);
    DensityMatrix joint{3, tensor_product(to_qcap(a), to_qcap(b))};
    const DensityMatrix ra = partial_trace(joint, {0});
    CHECK(max_entry_diff(ra.mat, a) < 1e-10);
    const DensityMatrix rb = partial_trace(joint, {1, 2});
    CHECK(max_entry_diff(rb.mat, b) < 1e-10);
  }
}

TEST_CASE("trace distance is symmetric and satisfies the triangle inequality") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 15; ++rep) {
    const DensityMatrix a = density_from(oracle::random_density(4, rng));
    const DensityMatrix b = density_from(oracle::random_density(4, rng));
    const DensityMatrix c = density_from(oracle::random_density(4, rng));
    const double ab = trace_distance(a, b), ba = trace_distance(b, a);
    const double bc = trace_distance(b, c), ac = trace_distance(a, c);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
  }
}

TEST_CASE("validate_density rejects broken states") {
  DensityMatrix bad{1, ComplexMatrix(2, 2)};
  bad.mat(0, 0) = 1.5;
  bad.mat(1, 1) = -0.5;  // trace 1 but not PSD
  CHECK_THROWS_AS(validate_density(bad, "test"), numerical_error);

  DensityMatrix scaled{1, ComplexMatrix(2, 2)};
  scaled.mat(0, 0) = 0.5;  // trace 1/2
  CHECK_THROWS_AS(validate_density(scaled, "test"), numerical_error);
}

TEST_SUITE_END();
