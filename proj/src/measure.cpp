#include "pls/measure.hpp"

#include "pls/errors.hpp"

namespace pls {

DiscreteMeasure build_measure(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& p_vec,
                              double tie_tol) {
  const Eigen::Index r = eigenvalues.size();
  if (p_vec.size() != r) throw ValidationError("build_measure: p_vec/eigenvalue size mismatch");
  if (r == 0) throw ValidationError("build_measure: empty spectrum");

  std::vector<double> support, masses;
  DiscreteMeasure mu;
  mu.spectrum_group.resize(r);
  Eigen::Index i = 0;
  while (i < r) {
    const double head = eigenvalues(i);
    double mass = 0.0, weighted = 0.0, count = 0.0;
    Eigen::Index j = i;
    while (j < r && head - eigenvalues(j) <= tie_tol * head) {
      mass += eigenvalues(j) * p_vec(j) * p_vec(j);
      weighted += eigenvalues(j);
      count += 1.0;
      mu.spectrum_group[j] = static_cast<int>(support.size());
      ++j;
    }
    support.push_back(weighted / count);
    masses.push_back(mass);
    i = j;
  }
  mu.support = Eigen::Map<Eigen::VectorXd>(support.data(), support.size());
  mu.masses = Eigen::Map<Eigen::VectorXd>(masses.data(), masses.size());
  if (!(mu.masses.maxCoeff() > 0.0)) throw DegenerateMeasureError();
  return mu;
}

DiscreteMeasure build_measure(const SpectralDecomposition& decomp, const Eigen::VectorXd& p_vec,
                              double tie_tol) {
  return build_measure(decomp.eigenvalues, p_vec, tie_tol);
}

Eigen::VectorXd moments(const DiscreteMeasure& mu, int count) {
  if (count < 1) throw ValidationError("moments: count must be >= 1");
  Eigen::VectorXd m(count);
  Eigen::VectorXd pw = Eigen::VectorXd::Ones(mu.points());
  for (int j = 0; j < count; ++j) {
    m(j) = (mu.masses.array() * pw.array()).sum();
    pw.array() *= mu.support.array();
  }
  return m;
}

}  // namespace pls
