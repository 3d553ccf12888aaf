#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "netdyad/dyad_graph.hpp"

namespace netdyad {

// Shell-size density: (1/M) sum_m |shell(m, s)|^k.
double shell_density(const DyadNetwork& net, std::uint32_t s, double k);

// Neighbourhood-overlap density:
//   (1/M) sum_m max_{m' in shell(m, s)} |N(m; r) \ N(m'; s - 1)|^k
// with N(m'; -1) empty. A dyad whose shell s is empty contributes 0.
double delta_density(const DyadNetwork& net, std::uint32_t s, std::uint32_t r,
                     double k, unsigned threads = 1);

// min over alpha in the grid of
//   delta_density(s, r; k alpha)^(1/alpha) * shell_density(s; alpha/(alpha-1))^((alpha-1)/alpha).
// Every alpha must exceed 1.
double composite_density(const DyadNetwork& net, std::uint32_t s,
                         std::uint32_t r, double k,
                         const std::vector<double>& alpha_grid,
                         unsigned threads = 1);

// 40 log-spaced points on (1.01, 8].
std::vector<double> default_alpha_grid();

// Per-dyad raw quantities behind the densities at one (s, r): the size of
// shell s and the largest neighbourhood difference over that shell. Every
// density at (s, r) is a function of these two vectors, so a grid of
// exponents costs one pass over the network.
struct ShellProfile {
  std::uint32_t s = 0;
  std::uint32_t r = 0;
  std::vector<std::size_t> shell_size;
  std::vector<std::size_t> max_difference;

  double shell_density(double k) const;
  double delta_density(double k) const;
  double composite_density(double k, const std::vector<double>& grid) const;
};

ShellProfile shell_profile(const DyadNetwork& net, std::uint32_t s,
                           std::uint32_t r, unsigned threads = 1);

struct DensenessRow {
  std::uint32_t s = 0;
  double shell_density_k1 = 0.0;  // delta^partial(s; 1)
  double delta_k2 = 0.0;          // Delta(s, b; 2)
  double composite_k2 = 0.0;      // c(s, b; 2)
};

// Screening report for the network conditions behind consistency of the
// network HAC estimator at a given bandwidth. Advisory: finite-sample
// values of quantities whose limits the asymptotics constrain.
struct DensenessReport {
  double bandwidth = 0.0;
  std::uint32_t radius = 0;     // floor(bandwidth), the neighbourhood radius r
  std::uint32_t max_s = 0;      // last tabulated shell
  std::uint32_t diameter = 0;   // largest finite dyad distance
  std::size_t n_dyads = 0;
  std::vector<double> alpha_grid;
  std::vector<DensenessRow> rows;
  double sum_shell_density = 0.0;     // sum_s delta^partial(s; 1)
  double scaled_composite_sum = 0.0;  // (1/M) sum_s c(s, b; 2)

  static constexpr const char* kEmptyShellConvention =
      "max over an empty shell contributes 0";
};

struct DensenessOptions {
  // Tabulate s = 0..min(max_s, diameter); unset means up to the diameter.
  std::optional<std::uint32_t> max_s;
  std::vector<double> alpha_grid = default_alpha_grid();
  unsigned threads = 1;
};

DensenessReport denseness_report(const DyadNetwork& net, double bandwidth,
                                 const DensenessOptions& options = {});

// Largest finite distance between dyads.
std::uint32_t dyad_diameter(const DyadNetwork& net, unsigned threads = 1);

}  // namespace netdyad
