#include "hsrc/resilience.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "hsrc/gf2.hpp"
#include "hsrc/rng.hpp"

namespace hsrc {

BigInt factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of negative");
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

namespace {

// rows[x][r] for one d, filled row by row:
//   rows[0] = selection of nothing (rank 0, one way);
//   r == x <= d: choose independent rows one after another;
//   r < x:  extend an (x-1)-selection by an independent or a dependent row.
struct RankTable {
  std::vector<std::vector<BigInt>> rows;
};

std::map<int, RankTable>& rank_cache() {
  static std::map<int, RankTable> cache;
  return cache;
}
std::mutex rank_cache_mutex;

const std::vector<BigInt>& rank_row(int d, int x) {
  std::lock_guard<std::mutex> lock(rank_cache_mutex);
  RankTable& table = rank_cache()[d];
  if (table.rows.empty()) {
    table.rows.emplace_back(d + 1, BigInt(0));
    table.rows[0][0] = 1;
  }
  while (table.rows.size() <= static_cast<std::size_t>(x)) {
    const int xx = static_cast<int>(table.rows.size());
    const std::vector<BigInt>& prev = table.rows[xx - 1];
    std::vector<BigInt> row(d + 1, BigInt(0));
    for (int r = 1; r <= d; ++r) {
      if (r > xx) continue;
      if (r == xx) {
        BigInt prod = 1;
        for (int i = 0; i < r; ++i) prod *= BigInt((1ull << d) - (1ull << i));
        row[r] = prod;
      } else {
        const BigInt independent = prev[r - 1] * BigInt((1ull << d) - (1ull << (r - 1)));
        // The dependent-row count 2^r - xx can print negative, but only where
        // prev[r] is already zero (a rank-r span has at most 2^r - 1 rows).
        const BigInt dependent = prev[r] * BigInt((std::int64_t{1} << r) - xx);
        row[r] = independent + dependent;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table.rows[x];
}

bool punctured_subspace_size(int n) { return n >= 1 && (static_cast<unsigned>(n) & (n + 1u)) == 0; }

}  // namespace

BigInt count_rank_submatrices(int x, int d, int r) {
  if (d < 1 || d > kMaxRankDimension) {
    throw std::invalid_argument("dimension must be in [1, " +
                                std::to_string(kMaxRankDimension) + "]");
  }
  if (x < 0 || static_cast<std::uint64_t>(x) > (1ull << d) - 1) {
    throw std::invalid_argument("x must be in [0, 2^d - 1]");
  }
  if (r < 0 || r > d || r > x) return 0;
  if (r == 0) return x == 0 ? BigInt(1) : BigInt(0);
  return rank_row(d, x)[r];
}

BigRat rank_fraction(int x, int d, int r) {
  const BigInt count = count_rank_submatrices(x, d, r);
  const BigInt total = binomial((1 << d) - 1, x) * factorial(x);
  return BigRat(count, total);
}

int rank_gf2(std::span<const std::uint32_t> rows) { return gf2::rank(rows); }

namespace {

void check_probability(const BigRat& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("probability outside [0, 1]");
}

}  // namespace

BigRat p_obj_src_exact(int n, int k, const BigRat& p_frag) {
  if (!punctured_subspace_size(n)) {
    throw std::invalid_argument("n+1 must be a power of two, got n=" + std::to_string(n));
  }
  const int d = std::bit_width(static_cast<unsigned>(n));  // n = 2^d - 1
  if (d > kMaxRankDimension) {
    throw std::invalid_argument("analytic table capped at n <= " +
                                std::to_string((1 << kMaxRankDimension) - 1) +
                                "; use simulation beyond that");
  }
  if (k < 1) throw std::invalid_argument("k must be positive");
  check_probability(p_frag);

  const BigRat q = BigRat(1) - p_frag;
  // p^x ascending and q^{n-x} descending, built incrementally.
  std::vector<BigRat> p_pow(n + 1), q_pow(n + 1);
  p_pow[0] = 1;
  q_pow[0] = 1;
  for (int i = 1; i <= n; ++i) {
    p_pow[i] = p_pow[i - 1] * p_frag;
    q_pow[i] = q_pow[i - 1] * q;
  }
  BigRat total = 0;
  for (int x = k; x <= n; ++x) {
    BigRat rank_ok = 0;
    for (int r = k; r <= std::min(d, x); ++r) rank_ok += rank_fraction(x, d, r);
    if (rank_ok == 0) continue;
    total += rank_ok * BigRat(binomial(n, x)) * p_pow[x] * q_pow[n - x];
  }
  return total;
}

double p_obj_src(int n, int k, double p_frag) {
  return p_obj_src_exact(n, k, BigRat(p_frag)).convert_to<double>();
}

BigRat p_obj_ec_exact(int n, int k, const BigRat& p_frag) {
  if (k < 0 || k > n) throw std::invalid_argument("need 0 <= k <= n");
  check_probability(p_frag);
  const BigRat q = BigRat(1) - p_frag;
  std::vector<BigRat> p_pow(n + 1), q_pow(n + 1);
  p_pow[0] = 1;
  q_pow[0] = 1;
  for (int i = 1; i <= n; ++i) {
    p_pow[i] = p_pow[i - 1] * p_frag;
    q_pow[i] = q_pow[i - 1] * q;
  }
  BigRat total = 0;
  for (int i = k; i <= n; ++i) total += BigRat(binomial(n, i)) * p_pow[i] * q_pow[n - i];
  return total;
}

double p_obj_ec(int n, int k, double p_frag) {
  return p_obj_ec_exact(n, k, BigRat(p_frag)).convert_to<double>();
}

McResult simulate_p_obj(const Code& code, double p_frag, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (p_frag < 0.0 || p_frag > 1.0) throw std::invalid_argument("probability outside [0, 1]");
  std::vector<std::uint32_t> point_bits;
  point_bits.reserve(code.n());
  for (const Element& p : code.points()) point_bits.push_back(p.bits());
  const int k = code.k();

  long successes = 0;
  for (long t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, static_cast<std::uint64_t>(t));
    gf2::Basis32 basis;
    for (std::uint32_t bits : point_bits) {
      if (rng.next_unit() < p_frag && basis.insert(bits) && basis.size() >= k) {
        ++successes;
        break;
      }
    }
  }
  const double estimate = static_cast<double>(successes) / static_cast<double>(trials);
  const double std_error = std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
  return {estimate, std_error};
}

void write_resilience_csv(std::ostream& os, const std::vector<ResilienceRow>& rows, int n,
                          int k, long trials, std::uint64_t seed) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    return std::string(buf);
  };
  os << "p_frag,p_obj_src,p_obj_ec,mc_estimate,mc_stderr,n,k,trials,seed\n";
  for (const ResilienceRow& row : rows) {
    char pf[40];
    std::snprintf(pf, sizeof(pf), "%.10g", row.p_frag);
    os << pf << ',' << cell(row.p_obj_src) << ',' << cell(row.p_obj_ec) << ','
       << cell(row.mc_estimate) << ',' << cell(row.mc_stderr) << ',' << n << ',' << k << ','
       << trials << ',' << seed << '\n';
  }
}

}  // namespace hsrc
