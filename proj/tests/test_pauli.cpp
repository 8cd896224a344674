#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "qecw/pauli.hpp"

using namespace qecw;

namespace {

using Cd = std::complex<double>;

std::vector<Cd> matmul(const std::vector<Cd>& a, const std::vector<Cd>& b, size_t dim) {
  std::vector<Cd> out(dim * dim, 0.0);
  for (size_t i = 0; i < dim; ++i)
    for (size_t k = 0; k < dim; ++k)
      for (size_t j = 0; j < dim; ++j) out[i + dim * j] += a[i + dim * k] * b[k + dim * j];
  return out;
}

bool close(const std::vector<Cd>& a, const std::vector<Cd>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  return true;
}

}  // namespace

TEST_CASE("identity times anything") {
  auto p = PauliString::from_string("XYZI");
  auto id = PauliString(4);
  CHECK(id * p == p);
  CHECK(p * id == p);
}

TEST_CASE("single qubit group law") {
  auto x = PauliString::from_string("X");
  auto z = PauliString::from_string("Z");
  auto xz = x * z;
  // X Z = -i Y
  CHECK(xz == PauliString::from_string("-iY"));
  CHECK(xz.str() == "-iY");
}

TEST_CASE("two qubit product X1X2 * Z1Z2") {
  auto xx = PauliString::from_string("XX");
  auto zz = PauliString::from_string("ZZ");
  auto prod = xx * zz;
  // (-i)^2 Y1 Y2 = -YY
  CHECK(prod == PauliString::from_string("-YY"));
  // check against dense matrices
  auto dense = matmul(xx.to_dense(), zz.to_dense(), 4);
  CHECK(close(dense, prod.to_dense()));
}

TEST_CASE("commutation rule") {
  CHECK(!PauliString::from_string("X").commutes(PauliString::from_string("Z")));
  CHECK(PauliString::from_string("XX").commutes(PauliString::from_string("ZZ")));
  CHECK(PauliString::from_string("XIX").commutes(PauliString::from_string("IZI")));
}

TEST_CASE("product matches dense multiplication on random pairs") {
  std::mt19937 gen(12345);
  for (int n = 1; n <= 4; ++n) {
    int trials = n <= 2 ? 400 : 100;
    for (int t = 0; t < trials; ++t) {
      PauliString a(n), b(n);
      for (int q = 0; q < n; ++q) {
        a.set_x(q, gen() & 1);
        a.set_z(q, gen() & 1);
        b.set_x(q, gen() & 1);
        b.set_z(q, gen() & 1);
      }
      a.set_phase_exponent(uint8_t(gen() & 3));
      b.set_phase_exponent(uint8_t(gen() & 3));
      auto prod = a * b;
      auto dense = matmul(a.to_dense(), b.to_dense(), size_t(1) << n);
      REQUIRE(close(dense, prod.to_dense()));
    }
  }
}

TEST_CASE("associativity spot checks") {
  std::mt19937 gen(99);
  for (int t = 0; t < 200; ++t) {
    PauliString p[3] = {PauliString(3), PauliString(3), PauliString(3)};
    for (auto& q : p) {
      for (int i = 0; i < 3; ++i) {
        q.set_x(i, gen() & 1);
        q.set_z(i, gen() & 1);
      }
      q.set_phase_exponent(uint8_t(gen() & 3));
    }
    CHECK((p[0] * p[1]) * p[2] == p[0] * (p[1] * p[2]));
  }
}

TEST_CASE("weight and parsing round trip") {
  auto p = PauliString::from_string("-iXIZY");
  CHECK(p.weight() == 3);
  CHECK(p.str() == "-iXIZY");
  CHECK(PauliString::from_string(p.str()) == p);
}
