#include "cpf/parametric.hpp"

#include "cpf/errors.hpp"
#include "cpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cpf {
namespace {

// Score matrix S (N x M) for a sampled ensemble; G = S^T S / N, grad e = S^T h / N.
Mat score_matrix(const ParametricFamily& fam, const Vec& theta, const Mat& X) {
  const int n = static_cast<int>(X.rows());
  Mat S(n, fam.dim_theta);
  for (int i = 0; i < n; ++i)
    S.row(i) = fam.score(X.row(i).transpose(), theta).transpose();
  return S;
}

void check_fisher_pd(const Mat& G) {
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  if (es.eigenvalues().minCoeff() < 1e-10)
    throw Error(ErrorCode::singular_fisher,
                "Fisher matrix eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) +
                    " below PD floor 1e-10");
}

}  // namespace

Mat fisher_mc(const ParametricFamily& fam, const Vec& theta, int n, std::uint64_t seed) {
  Mat X = fam.sampler(theta, n, seed);
  Mat S = score_matrix(fam, theta, X);
  Mat G = (S.transpose() * S) / static_cast<double>(n);
  G = 0.5 * (G + G.transpose());
  check_fisher_pd(G);
  return G;
}

Vec grad_e_mc(const ParametricFamily& fam, const Vec& theta, const ObjectiveSpec& objective,
              int n, std::uint64_t seed) {
  Mat X = fam.sampler(theta, n, seed);
  Mat S = score_matrix(fam, theta, X);
  Vec h(n);
  for (int i = 0; i < n; ++i) h[i] = objective.eval(X.row(i).transpose());
  return (S.transpose() * h) / static_cast<double>(n);
}

NaturalGradState natural_grad_step(const NaturalGradState& state, const ParametricFamily& fam,
                                   const ObjectiveSpec& objective, double beta, double dt,
                                   int n, std::uint64_t seed) {
  Mat G;
  Vec ge;

  const bool need_mc = !fam.fisher_analytic || !fam.grad_e_analytic;
  Mat X, S;
  if (need_mc) {
    X = fam.sampler(state.theta, n, seed);
    S = score_matrix(fam, state.theta, X);
  }

  if (fam.fisher_analytic) {
    G = fam.fisher_analytic(state.theta);
  } else {
    G = (S.transpose() * S) / static_cast<double>(n);
    G = 0.5 * (G + G.transpose());
  }
  check_fisher_pd(G);

  if (fam.grad_e_analytic) {
    ge = fam.grad_e_analytic(state.theta, objective);
  } else {
    const int nn = static_cast<int>(X.rows());
    Vec h(nn);
    for (int i = 0; i < nn; ++i) h[i] = objective.eval(X.row(i).transpose());
    ge = (S.transpose() * h) / static_cast<double>(nn);
  }

  NaturalGradState out;
  out.theta = state.theta - dt * beta * Eigen::LDLT<Mat>(G).solve(ge);
  out.t = state.t + dt;
  return out;
}

// Gaussian family ------------------------------------------------------------

namespace {

int vech_size(int d) { return d * (d + 1) / 2; }

// vech ordering: (0,0), (1,0), ..., (d-1,0), (1,1), ... lower triangle by column
std::vector<std::pair<int, int>> vech_index(int d) {
  std::vector<std::pair<int, int>> idx;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) idx.emplace_back(i, j);
  return idx;
}

Mat unvech(const Vec& v, int d) {
  Mat S(d, d);
  int p = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      S(i, j) = v[p];
      S(j, i) = v[p];
      ++p;
    }
  return S;
}

}  // namespace

Vec gaussian_theta(const GaussianMoments& moments) {
  const int d = static_cast<int>(moments.mean.size());
  Vec theta(d + vech_size(d));
  theta.head(d) = moments.mean;
  int p = d;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) theta[p++] = moments.cov(i, j);
  return theta;
}

GaussianMoments gaussian_moments(const Vec& theta, int dim) {
  return {theta.head(dim), unvech(theta.tail(vech_size(dim)), dim)};
}

ParametricFamily gaussian_family(int dim) {
  const auto idx = vech_index(dim);

  ParametricFamily fam;
  fam.dim_x = dim;
  fam.dim_theta = dim + vech_size(dim);

  fam.log_density = [dim](const Vec& x, const Vec& theta) {
    GaussianMoments mom = gaussian_moments(theta, dim);
    Eigen::LLT<Mat> llt(mom.cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::singular_fisher, "gaussian family: covariance not PD");
    Vec z = x - mom.mean;
    double quad = z.dot(llt.solve(z));
    double logdet = 0.0;
    for (int i = 0; i < dim; ++i) logdet += 2.0 * std::log(llt.matrixLLT()(i, i));
    return -0.5 * quad - 0.5 * logdet - 0.5 * dim * std::log(2.0 * M_PI);
  };

  fam.score = [dim, idx](const Vec& x, const Vec& theta) {
    GaussianMoments mom = gaussian_moments(theta, dim);
    Eigen::LLT<Mat> llt(mom.cov);
    Vec y = llt.solve(x - mom.mean);            // Sigma^{-1}(x-m)
    Mat P = llt.solve(Mat::Identity(dim, dim)); // Sigma^{-1}
    Mat W = y * y.transpose() - P;
    Vec s(dim + static_cast<int>(idx.size()));
    s.head(dim) = y;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      auto [i, j] = idx[p];
      s[dim + static_cast<int>(p)] = (i == j) ? 0.5 * W(i, i) : W(i, j);
    }
    return s;
  };

  fam.sampler = [dim](const Vec& theta, int n, std::uint64_t seed) {
    GaussianMoments mom = gaussian_moments(theta, dim);
    Eigen::LLT<Mat> llt(mom.cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::singular_fisher, "gaussian family: covariance not PD");
    Mat L = llt.matrixL();
    Mat X(n, dim);
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, streams::init, static_cast<std::uint64_t>(i)));
      Vec z(dim);
      for (int c = 0; c < dim; ++c) z[c] = rng.normal();
      X.row(i) = (mom.mean + L * z).transpose();
    }
    return X;
  };

  fam.fisher_analytic = [dim, idx](const Vec& theta) {
    GaussianMoments mom = gaussian_moments(theta, dim);
    Eigen::LLT<Mat> llt(mom.cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::singular_fisher, "gaussian family: covariance not PD");
    Mat P = llt.solve(Mat::Identity(dim, dim));
    const int m = static_cast<int>(idx.size());
    Mat G = Mat::Zero(dim + m, dim + m);
    G.topLeftCorner(dim, dim) = P;
    // G_{pq} = 1/2 tr(P B_p P B_q), B_p the symmetric basis matrix of entry p
    std::vector<Mat> B(m);
    for (int p = 0; p < m; ++p) {
      auto [i, j] = idx[p];
      B[p] = Mat::Zero(dim, dim);
      B[p](i, j) = 1.0;
      B[p](j, i) = 1.0;
      if (i == j) B[p](i, i) = 1.0;
    }
    for (int p = 0; p < m; ++p)
      for (int q = p; q < m; ++q) {
        const double v = 0.5 * (P * B[p] * P * B[q]).trace();
        G(dim + p, dim + q) = v;
        G(dim + q, dim + p) = v;
      }
    return G;
  };

  return fam;
}

// Exponential family ---------------------------------------------------------

std::pair<Vec, Vec> gauss_legendre(int n, double lo, double hi) {
  // Newton iteration on Legendre P_n, initial guesses from the Chebyshev points
  Vec x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {std::move(x), std::move(w)};
}

ParametricFamily exponential_family(const BasisSet& psi, const QuadratureGrid& domain) {
  const int m = psi.size();
  auto [nodes, weights] = gauss_legendre(domain.n_nodes, domain.lo, domain.hi);
  const int nq = static_cast<int>(nodes.size());

  // psi evaluated on the quadrature nodes, fixed once
  Mat Psi(nq, m);
  for (int q = 0; q < nq; ++q) {
    Vec x = Vec::Constant(1, nodes[q]);
    for (int k = 0; k < m; ++k) Psi(q, k) = psi.funcs[k](x);
  }

  // node probabilities w_q rho(x_q; theta), computed with a max-shift; the
  // log normalizer comes out alongside
  auto node_weights = [Psi, weights = weights, nq](const Vec& theta, double* log_z) {
    Vec expo = Psi * theta;
    const double shift = expo.maxCoeff();
    Vec p(nq);
    double z = 0.0;
    for (int q = 0; q < nq; ++q) {
      p[q] = weights[q] * std::exp(expo[q] - shift);
      z += p[q];
    }
    if (!(z > 0.0) || !std::isfinite(z))
      throw Error(ErrorCode::quadrature_overflow,
                  "exponential family: normalizer not finite at this theta");
    if (log_z != nullptr) *log_z = std::log(z) + shift;
    p /= z;
    return p;
  };

  ParametricFamily fam;
  fam.dim_x = 1;
  fam.dim_theta = m;

  fam.log_density = [psi, node_weights, m](const Vec& x, const Vec& theta) {
    double log_z = 0.0;
    node_weights(theta, &log_z);
    double dot = 0.0;
    for (int k = 0; k < m; ++k) dot += theta[k] * psi.funcs[k](x);
    return dot - log_z;
  };

  fam.score = [psi, node_weights, Psi, m](const Vec& x, const Vec& theta) {
    Vec p = node_weights(theta, nullptr);
    Vec psihat = Psi.transpose() * p;  // E[psi]
    Vec s(m);
    for (int k = 0; k < m; ++k) s[k] = psi.funcs[k](x) - psihat[k];
    return s;
  };

  // inverse-CDF sampler on the quadrature measure (piecewise-constant over nodes)
  fam.sampler = [node_weights, nodes = nodes, nq](const Vec& theta, int n, std::uint64_t seed) {
    Vec p = node_weights(theta, nullptr);
    Vec cum(nq);
    double acc = 0.0;
    for (int q = 0; q < nq; ++q) {
      acc += p[q];
      cum[q] = acc;
    }
    cum[nq - 1] = 1.0;
    Mat X(n, 1);
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, streams::init, static_cast<std::uint64_t>(i)));
      const double u = rng.uniform01();
      const int q = static_cast<int>(std::lower_bound(cum.data(), cum.data() + nq, u) -
                                     cum.data());
      X(i, 0) = nodes[std::min(q, nq - 1)];
    }
    return X;
  };

  fam.fisher_analytic = [node_weights, Psi, m](const Vec& theta) {
    Vec p = node_weights(theta, nullptr);
    Vec psihat = Psi.transpose() * p;
    Mat centered = Psi.rowwise() - psihat.transpose();
    Mat G = centered.transpose() * p.asDiagonal() * centered;
    return Mat(0.5 * (G + G.transpose()));
  };

  fam.grad_e_analytic = [node_weights, Psi, nodes = nodes, m, nq](const Vec& theta,
                                                                  const ObjectiveSpec& objective) {
    Vec p = node_weights(theta, nullptr);
    Vec psihat = Psi.transpose() * p;
    Vec ge = Vec::Zero(m);
    for (int q = 0; q < nq; ++q) {
      const double h = objective.eval(Vec::Constant(1, nodes[q]));
      for (int k = 0; k < m; ++k) ge[k] += h * (Psi(q, k) - psihat[k]) * p[q];
    }
    return ge;
  };

  return fam;
}

}  // namespace cpf
