#include "hsrc/bandwidth.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hsrc {

namespace {

void require_subspace_n(int n) {
  if (n < 3 || (static_cast<unsigned>(n) & (n + 1u)) != 0) {
    throw std::invalid_argument("n+1 must be a power of two, got n=" + std::to_string(n));
  }
}

}  // namespace

double pair_available_probability(int x, int n) {
  require_subspace_n(n);
  if (x < 0 || x > n) throw std::invalid_argument("x must be in [0, n]");
  const int diversity = (n - 1) / 2;
  const double both = static_cast<double>(x) / n * (static_cast<double>(x) / n);
  return 1.0 - std::pow(1.0 - both, diversity);
}

double single_repair_downloads(int x, int n, int k) {
  require_subspace_n(n);
  if (x < 0 || x > n) throw std::invalid_argument("x must be in [0, n]");
  if (2 * x >= n + 1) return 2.0;
  const double p2 = pair_available_probability(x, n);
  return 2.0 * p2 + k * (1.0 - p2);
}

AggregateDownloads aggregate_downloads(int x, int n, int k) {
  require_subspace_n(n);
  if (x < 0 || x > n) throw std::invalid_argument("x must be in [0, n]");
  AggregateDownloads out{0.0, 0.0};
  out.parallel = (n - x) * single_repair_downloads(x, n, k);
  // n - x repair steps, each raising availability by one; the hypothetical
  // i = n term would repair nothing and is zero.
  for (int i = x; i < n; ++i) out.sequential += single_repair_downloads(i, n, k);
  return out;
}

double eager_repair_downloads(int x_th, int n) { return 2.0 * (n - x_th); }

double ec_lazy_downloads(int x_th, int n, int k) {
  return static_cast<double>(k) + n - x_th - 1;
}

int critical_threshold(int n, int k) { return n + 1 - k; }

std::vector<TrafficRow> traffic_table(int n, int k) {
  require_subspace_n(n);
  if (k < 1 || k >= n) throw std::invalid_argument("need 1 <= k < n");
  std::vector<TrafficRow> rows;
  rows.reserve(n - k);
  for (int x_th = k; x_th <= n - 1; ++x_th) {
    const int lost = n - x_th;
    const AggregateDownloads agg = aggregate_downloads(x_th, n, k);
    TrafficRow row{};
    row.x_th = x_th;
    row.d_eager = eager_repair_downloads(x_th, n);
    row.d_prl = agg.parallel;
    row.d_seq = agg.sequential;
    row.d_ec_lazy = ec_lazy_downloads(x_th, n, k);
    row.per_lost_eager = row.d_eager / lost;
    row.per_lost_prl = row.d_prl / lost;
    row.per_lost_seq = row.d_seq / lost;
    row.per_lost_ec = row.d_ec_lazy / lost;
    rows.push_back(row);
  }
  return rows;
}

void write_traffic_csv(std::ostream& os, const std::vector<TrafficRow>& rows, int n, int k) {
  os << "x_th,d_eager,d_prl,d_seq,d_ec_lazy,per_lost_eager,per_lost_prl,per_lost_seq,"
        "per_lost_ec,n,k\n";
  char buf[256];
  for (const TrafficRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%d\n", r.x_th,
                  r.d_eager, r.d_prl, r.d_seq, r.d_ec_lazy, r.per_lost_eager, r.per_lost_prl,
                  r.per_lost_seq, r.per_lost_ec, n, k);
    os << buf;
  }
}

}  // namespace hsrc
