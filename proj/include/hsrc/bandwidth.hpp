#pragma once

#include <iosfwd>
#include <vector>

namespace hsrc {

// Repair-traffic model. x is the number of fragments still available out of
// n = 2^d - 1; repairs move whole fragments, so costs are fragment counts.

// Probability that at least one of the (n-1)/2 disjoint repair pairs of a
// missing fragment is fully available: 1 - (1 - (x/n)^2)^((n-1)/2).
double pair_available_probability(int x, int n);

// Downloads to recreate one missing fragment. Exactly 2 when
// x >= (n+1)/2; below that threshold this is the upper bound
// 2*p2 + k*(1-p2), not an exact expectation.
double single_repair_downloads(int x, int n, int k);

struct AggregateDownloads {
  double parallel;    // (n-x) simultaneous repairs at the single-repair cost
  double sequential;  // one repair at a time, availability rising each step
};
AggregateDownloads aggregate_downloads(int x, int n, int k);

// Eager strategy: 2(n - x_th) total. Any n.
double eager_repair_downloads(int x_th, int n);

// Lazy repair with a classical erasure code: rebuild the object once (k
// downloads), then replenish the other n - x_th - 1 fragments.
double ec_lazy_downloads(int x_th, int n, int k);

// Threshold n+1-k below which whole-object EC lazy repair moves less data
// than pairwise self-repair.
int critical_threshold(int n, int k);

struct TrafficRow {
  int x_th;
  double d_eager;
  double d_prl;
  double d_seq;
  double d_ec_lazy;
  double per_lost_eager;
  double per_lost_prl;
  double per_lost_seq;
  double per_lost_ec;
};

// Rows for x_th = k .. n-1; per-lost columns divide by n - x_th.
std::vector<TrafficRow> traffic_table(int n, int k);

// CSV columns:
// x_th,d_eager,d_prl,d_seq,d_ec_lazy,per_lost_eager,per_lost_prl,per_lost_seq,per_lost_ec,n,k
void write_traffic_csv(std::ostream& os, const std::vector<TrafficRow>& rows, int n, int k);

}  // namespace hsrc
