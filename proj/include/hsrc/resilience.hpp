#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hsrc/code.hpp"

namespace hsrc {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Exact counts grow super-exponentially and the rank fractions must cancel
// exactly against the brute-force oracle, hence arbitrary-precision integers
// and rationals throughout the analytic path.

BigInt factorial(int n);
BigInt binomial(int n, int k);

// Number of ordered selections of x distinct rows of the (2^d - 1) x d
// matrix of all nonzero d-bit rows whose rank is r (row permutations
// counted). Memoized; d is capped so tables stay small.
constexpr int kMaxRankDimension = 12;
BigInt count_rank_submatrices(int x, int d, int r);

// Fraction of x-row selections with rank r: count / (C(2^d-1, x) * x!).
BigRat rank_fraction(int x, int d, int r);

// GF(2) row rank of coordinate vectors.
int rank_gf2(std::span<const std::uint32_t> rows);

// Probability that an object stored with a full-subspace (n = 2^d - 1) code
// survives i.i.d. fragment availability p_frag: rank of the surviving points
// must reach k.
BigRat p_obj_src_exact(int n, int k, const BigRat& p_frag);
double p_obj_src(int n, int k, double p_frag);

// MDS erasure-code baseline: any k of n fragments suffice.
BigRat p_obj_ec_exact(int n, int k, const BigRat& p_frag);
double p_obj_ec(int n, int k, double p_frag);

struct McResult {
  double estimate;
  double std_error;  // binomial standard error sqrt(p(1-p)/trials)
};

// Monte Carlo estimate of object availability. Trial t draws its randomness
// from SplitMix64 substream (seed, t), so the result is independent of any
// parallel execution layout and reproducible for a fixed seed.
McResult simulate_p_obj(const Code& code, double p_frag, long trials, std::uint64_t seed);

struct ResilienceRow {
  double p_frag;
  std::optional<double> p_obj_src;
  std::optional<double> p_obj_ec;
  std::optional<double> mc_estimate;
  std::optional<double> mc_stderr;
};

// CSV columns: p_frag,p_obj_src,p_obj_ec,mc_estimate,mc_stderr,n,k,trials,seed
void write_resilience_csv(std::ostream& os, const std::vector<ResilienceRow>& rows, int n,
                          int k, long trials, std::uint64_t seed);

}  // namespace hsrc
