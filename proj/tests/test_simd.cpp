#include "cpf/rng.hpp"
#include "cpf/simd.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

using namespace cpf;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  Rng rng(derive_seed(seed, streams::generic));
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

// sizes that cover empty input, sub-lane tails and multi-block bodies
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 100, 1023};

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  const auto& act = simd::kernels();
  INFO("active backend: ", simd::backend_name());

  for (std::size_t n : kSizes) {
    auto a = random_vec(n, 11), b = random_vec(n, 22), c = random_vec(n, 33);

    CHECK(act.dot(a.data(), b.data(), n) ==
          doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(1e-13));
    CHECK(act.dot3(a.data(), b.data(), c.data(), n) ==
          doctest::Approx(ref.dot3(a.data(), b.data(), c.data(), n)).epsilon(1e-13));
    CHECK(act.sum(a.data(), n) == doctest::Approx(ref.sum(a.data(), n)).epsilon(1e-13));

    auto y1 = b, y2 = b;
    act.axpy(0.7, a.data(), y1.data(), n);
    ref.axpy(0.7, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

    auto acc1 = c, acc2 = c;
    act.sq_dist_accum(a.data(), 0.3, acc1.data(), n);
    ref.sq_dist_accum(a.data(), 0.3, acc2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(acc1[i] == doctest::Approx(acc2[i]).epsilon(1e-14));
  }
}

TEST_CASE("exp_scale agrees with std::exp across the argument range") {
  const auto& act = simd::kernels();
  // typical gain-kernel arguments are exp(-r^2/4eps): cover tiny to huge
  std::vector<double> args;
  for (double x = -700.0; x <= 40.0; x += 3.7) args.push_back(x);
  args.insert(args.end(), {-745.0, -720.0, -1e-12, 0.0, 1e-12, 709.0});

  std::vector<double> out(args.size());
  act.exp_scale(args.data(), 1.0, out.data(), args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    const double expd = std::exp(args[i]);
    if (expd < 1e-300) {
      CHECK(out[i] <= 1e-300);
    } else {
      CHECK(out[i] == doctest::Approx(expd).epsilon(4e-15));
    }
  }
}

TEST_CASE("exp_scale applies the scale factor") {
  const auto& act = simd::kernels();
  auto x = random_vec(33, 7, 4.0);
  std::vector<double> out(x.size());
  act.exp_scale(x.data(), -0.5, out.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(out[i] == doctest::Approx(std::exp(-0.5 * x[i])).epsilon(4e-15));
}

#if defined(__x86_64__)
TEST_CASE("avx2 variants are exercised when the CPU supports them") {
  if (simd::avx2_supported()) {
    // CPF_SIMD=scalar in the environment is the only way to opt out
    const char* env = std::getenv("CPF_SIMD");
    if (env == nullptr || std::string(env) != "scalar")
      CHECK(simd::active_backend() == simd::Backend::avx2);
  }
}
#endif
