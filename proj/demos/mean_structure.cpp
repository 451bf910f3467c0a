// Eigenstructure, mean path and second-moment bound for a few offspring means,
// next to a simulated path.

#include "gwi/gwi.hpp"

#include <cstdio>

int main() {
  for (auto [a, b] : {std::pair{0.3, 0.2}, std::pair{0.5, 0.5}, std::pair{0.9, 0.4}}) {
    const auto ms = gwi::mean_structure(a, b);
    std::printf("m_xi=%.2f m_eta=%.2f  lambda+=%.5f lambda-=%.5f  %s\n", a, b, ms.lambda_plus,
                ms.lambda_minus, gwi::to_string(ms.criticality).c_str());
    for (int n : {1, 5, 10, 20}) {
      std::printf("  n=%-3d m_n=%-12.6g E X_n(eps mean 1)=%-12.6g E X_n^2 bound=%.6g\n", n,
                  gwi::m_seq(ms, n), gwi::expectation(ms, n, 1.0, 0.0, 1.0),
                  gwi::second_moment_bound(ms, a * (1 - a), b * (1 - b), n));
    }
  }

  gwi::ModelParams m;
  m.xi = gwi::Poisson(0.6);
  m.eta = gwi::Poisson(0.3);
  m.eps = gwi::Geometric(0.5);
  m.x0 = gwi::Constant(5);
  const gwi::Path p = gwi::simulate_path(m, 15, 7);
  std::printf("path:");
  for (int n = -1; n <= 15; ++n) std::printf(" %llu", static_cast<unsigned long long>(p.at(n)));
  std::printf("\n");
}
