#include "netdyad/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netdyad/error.hpp"
#include "netdyad/parallel.hpp"

namespace netdyad {

namespace {

double power_mean(const std::vector<std::size_t>& sizes, double k) {
  if (sizes.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t v : sizes) total += std::pow(static_cast<double>(v), k);
  return total / static_cast<double>(sizes.size());
}

void check_exponent(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ValidationError("density exponent must be finite and > 0");
  }
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("alpha grid must be nonempty");
  for (double a : grid) {
    if (!(a > 1.0) || !std::isfinite(a)) {
      throw ValidationError("every alpha in the grid must be finite and > 1");
    }
  }
}

struct ProfileScratch {
  explicit ProfileScratch(const DyadNetwork& net)
      : outer(net), inner(net), mark(net.size(), 0) {}
  ShellWalker outer;
  ShellWalker inner;
  std::vector<std::uint32_t> mark;
  std::uint32_t generation = 0;
};

}  // namespace

double ShellProfile::shell_density(double k) const {
  check_exponent(k);
  return power_mean(shell_size, k);
}

double ShellProfile::delta_density(double k) const {
  check_exponent(k);
  return power_mean(max_difference, k);
}

double ShellProfile::composite_density(double k,
                                       const std::vector<double>& grid) const {
  check_exponent(k);
  check_grid(grid);
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : grid) {
    const double delta = power_mean(max_difference, k * alpha);
    const double shell = power_mean(shell_size, alpha / (alpha - 1.0));
    const double value = std::pow(delta, 1.0 / alpha) *
                         std::pow(shell, (alpha - 1.0) / alpha);
    best = std::min(best, value);
  }
  return best;
}

ShellProfile shell_profile(const DyadNetwork& net, std::uint32_t s,
                           std::uint32_t r, unsigned threads) {
  ShellProfile p;
  p.s = s;
  p.r = r;
  p.shell_size.assign(net.size(), 0);
  p.max_difference.assign(net.size(), 0);
  parallel_for_with_state(
      net.size(), threads, [&] { return ProfileScratch(net); },
      [&](ProfileScratch& sc, std::size_t mi) {
        const auto m = static_cast<DyadId>(mi);
        sc.outer.walk(m, std::max(s, r));
        // Neighbourhood N(m; r): every visited dyad at distance <= r.
        if (++sc.generation == 0) {
          std::fill(sc.mark.begin(), sc.mark.end(), 0);
          sc.generation = 1;
        }
        std::size_t ball = 0;
        for (DyadId d : sc.outer.visited()) {
          if (sc.outer.distance_to(d).hops() > r) break;
          sc.mark[d] = sc.generation;
          ++ball;
        }
        const auto shell = sc.outer.shell(s);
        p.shell_size[mi] = shell.size();
        if (shell.empty()) return;
        if (s == 0) {
          p.max_difference[mi] = ball;
          return;
        }
        std::size_t best = 0;
        for (DyadId other : shell) {
          sc.inner.walk(other, s - 1);
          std::size_t overlap = 0;
          for (DyadId d : sc.inner.visited()) {
            if (sc.mark[d] == sc.generation) ++overlap;
          }
          best = std::max(best, ball - overlap);
        }
        p.max_difference[mi] = best;
      });
  return p;
}

double shell_density(const DyadNetwork& net, std::uint32_t s, double k) {
  check_exponent(k);
  ShellWalker walker(net);
  double total = 0.0;
  for (DyadId m = 0; m < net.size(); ++m) {
    walker.walk(m, s);
    total += std::pow(static_cast<double>(walker.shell(s).size()), k);
  }
  return net.size() == 0 ? 0.0 : total / static_cast<double>(net.size());
}

double delta_density(const DyadNetwork& net, std::uint32_t s, std::uint32_t r,
                     double k, unsigned threads) {
  check_exponent(k);
  return shell_profile(net, s, r, threads).delta_density(k);
}

double composite_density(const DyadNetwork& net, std::uint32_t s,
                         std::uint32_t r, double k,
                         const std::vector<double>& alpha_grid,
                         unsigned threads) {
  check_exponent(k);
  check_grid(alpha_grid);
  return shell_profile(net, s, r, threads).composite_density(k, alpha_grid);
}

std::vector<double> default_alpha_grid() {
  constexpr int kPoints = 40;
  const double lo = std::log(1.01);
  const double hi = std::log(8.0);
  std::vector<double> grid(kPoints);
  // Left-open: the first point sits one step above 1.01.
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * (i + 1) / kPoints);
  }
  grid.back() = 8.0;
  return grid;
}

std::uint32_t dyad_diameter(const DyadNetwork& net, unsigned threads) {
  std::vector<std::uint32_t> ecc(net.size(), 0);
  parallel_for_with_state(
      net.size(), threads, [&] { return ShellWalker(net); },
      [&](ShellWalker& w, std::size_t m) {
        ecc[m] = w.walk(static_cast<DyadId>(m),
                        std::numeric_limits<std::uint32_t>::max());
      });
  return ecc.empty() ? 0 : *std::max_element(ecc.begin(), ecc.end());
}

DensenessReport denseness_report(const DyadNetwork& net, double bandwidth,
                                 const DensenessOptions& options) {
  if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth)) {
    throw ValidationError("bandwidth must be finite and >= 0");
  }
  check_grid(options.alpha_grid);
  DensenessReport rep;
  rep.bandwidth = bandwidth;
  rep.radius = static_cast<std::uint32_t>(
      std::min(std::floor(bandwidth), static_cast<double>(net.size())));
  rep.n_dyads = net.size();
  rep.alpha_grid = options.alpha_grid;
  rep.diameter = dyad_diameter(net, options.threads);
  rep.max_s = options.max_s ? std::min(*options.max_s, rep.diameter)
                            : rep.diameter;
  for (std::uint32_t s = 0; s <= rep.max_s; ++s) {
    const ShellProfile prof = shell_profile(net, s, rep.radius, options.threads);
    DensenessRow row;
    row.s = s;
    row.shell_density_k1 = prof.shell_density(1.0);
    row.delta_k2 = prof.delta_density(2.0);
    row.composite_k2 = prof.composite_density(2.0, options.alpha_grid);
    rep.sum_shell_density += row.shell_density_k1;
    rep.scaled_composite_sum += row.composite_k2;
    rep.rows.push_back(row);
  }
  if (rep.n_dyads > 0) rep.scaled_composite_sum /= static_cast<double>(rep.n_dyads);
  return rep;
}

}  // namespace netdyad
