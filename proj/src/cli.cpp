#include "hsrc/cli.hpp"

#include <CLI11.hpp>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>

#include "hsrc/bandwidth.hpp"
#include "hsrc/code.hpp"
#include "hsrc/container.hpp"
#include "hsrc/errors.hpp"
#include "hsrc/field.hpp"
#include "hsrc/repair.hpp"
#include "hsrc/resilience.hpp"
#include "hsrc/scheduler.hpp"

namespace fs = std::filesystem;

namespace hsrc::cli {

namespace {

std::vector<std::uint8_t> read_binary(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

void write_binary(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw FormatError("cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!file) throw FormatError("short write to " + path.string());
}

// Output sink: --out FILE or stdout.
struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Sink(const std::string& out) {
    if (!out.empty()) {
      file.open(out, std::ios::trunc);
      if (!file) throw FormatError("cannot open " + out + " for writing");
      os = &file;
    }
  }
};

int subspace_dimension(int n) {
  if (n < 3 || (static_cast<unsigned>(n) & (n + 1u)) != 0) {
    throw std::invalid_argument("n+1 must be a power of two (subspace code), got n=" +
                                std::to_string(n));
  }
  return std::bit_width(static_cast<unsigned>(n));
}

std::uint32_t parse_poly(const std::string& text) {
  return static_cast<std::uint32_t>(std::stoul(text, nullptr, 0));
}

Field make_cli_field(int m, const std::string& modulus) {
  if (modulus.empty()) return Field::with_default_modulus(m);
  return Field(m, parse_poly(modulus));
}

Code make_cli_code(int m, const std::string& modulus, int k, int n) {
  const int d = subspace_dimension(n);
  if (d > m) {
    throw std::invalid_argument("n=" + std::to_string(n) + " needs a subspace of dimension " +
                                std::to_string(d) + " > m=" + std::to_string(m));
  }
  return Code::subspace(make_cli_field(m, modulus), k, d);
}

std::string fragment_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frag_%05d.hsrc", index);
  return buf;
}

FragmentFileHeader make_header(const Code& code, int index, std::uint64_t object_bytes,
                               std::uint32_t stripe_count) {
  FragmentFileHeader h;
  h.version = 1;
  h.degree = static_cast<std::uint8_t>(code.field().degree());
  h.modulus = code.field().modulus();
  h.k = static_cast<std::uint8_t>(code.k());
  h.n = static_cast<std::uint16_t>(code.n());
  h.index = static_cast<std::uint16_t>(index);
  h.point = code.point(index).bits();
  h.object_bytes = object_bytes;
  h.stripe_count = stripe_count;
  return h;
}

std::uint32_t expected_stripes(const Code& code, std::uint64_t object_bytes) {
  const std::uint64_t stripe_bits =
      static_cast<std::uint64_t>(code.k()) * code.field().degree();
  return object_bytes == 0
             ? 0u
             : static_cast<std::uint32_t>((object_bytes * 8 + stripe_bits - 1) / stripe_bits);
}

// Reads fragment files, checks they describe one common object, and returns
// the reconstructed code plus fragments.
struct LoadedFragments {
  Code code;
  std::vector<Fragment> fragments;
  std::uint64_t object_bytes;
  std::uint32_t stripe_count;
};

LoadedFragments load_fragments(const std::vector<std::string>& paths) {
  if (paths.empty()) throw FormatError("no fragment files given");
  std::optional<FragmentFileHeader> first;
  std::vector<std::pair<FragmentFileHeader, std::vector<std::uint32_t>>> raw;
  for (const std::string& path : paths) {
    auto loaded = read_fragment_file(path);
    const FragmentFileHeader& h = loaded.first;
    if (!first) {
      first = h;
    } else if (h.degree != first->degree || h.modulus != first->modulus || h.k != first->k ||
               h.n != first->n || h.object_bytes != first->object_bytes ||
               h.stripe_count != first->stripe_count) {
      throw FormatError("fragment files describe different objects: " + path);
    }
    raw.push_back(std::move(loaded));
  }
  const int d = subspace_dimension(first->n);
  if (d > first->degree) throw FormatError("fragment header: n too large for field degree");
  Code code = Code::subspace(Field(first->degree, first->modulus), first->k, d);
  LoadedFragments out{std::move(code), {}, first->object_bytes, first->stripe_count};
  if (expected_stripes(out.code, out.object_bytes) != out.stripe_count) {
    throw FormatError("stripe count does not match object length");
  }
  std::set<int> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const FragmentFileHeader& h = raw[i].first;
    if (h.point != out.code.point(h.index).bits()) {
      throw FormatError("fragment " + paths[i] + " carries the wrong evaluation point");
    }
    if (!seen.insert(h.index).second) {
      throw FormatError("duplicate fragment index " + std::to_string(h.index));
    }
    out.fragments.push_back(
        Fragment{h.index, out.code.point(h.index), std::move(raw[i].second)});
  }
  return out;
}

int cmd_encode(const std::string& in, const std::string& outdir, int m, int k, int n,
               const std::string& modulus) {
  const Code code = make_cli_code(m, modulus, k, n);
  const std::vector<std::uint8_t> bytes = read_binary(in);
  const std::vector<Fragment> fragments = encode_object(bytes, code);
  fs::create_directories(outdir);
  const std::uint32_t stripes = expected_stripes(code, bytes.size());
  for (const Fragment& frag : fragments) {
    write_fragment_file(fs::path(outdir) / fragment_name(frag.index),
                        make_header(code, frag.index, bytes.size(), stripes), frag.values);
  }
  return 0;
}

int cmd_decode(const std::string& out, const std::vector<std::string>& files) {
  LoadedFragments loaded = load_fragments(files);
  const std::vector<std::uint8_t> bytes =
      decode_object(loaded.fragments, loaded.code, loaded.object_bytes);
  write_binary(out, bytes);
  return 0;
}

int cmd_repair(const std::string& outdir, const std::vector<std::string>& files) {
  LoadedFragments loaded = load_fragments(files);
  std::set<int> present;
  std::vector<int> available;
  for (const Fragment& frag : loaded.fragments) {
    present.insert(frag.index);
    available.push_back(frag.index);
  }
  fs::create_directories(outdir);
  std::map<int, const Fragment*> by_index;
  for (const Fragment& frag : loaded.fragments) by_index[frag.index] = &frag;
  for (int index = 1; index <= loaded.code.n(); ++index) {
    if (present.count(index)) continue;
    const std::vector<int> donors_idx =
        find_repair_set(loaded.code.point(index), available, loaded.code);
    std::vector<Fragment> donors;
    donors.reserve(donors_idx.size());
    for (int donor : donors_idx) donors.push_back(*by_index.at(donor));
    const Fragment repaired = repair_fragment(loaded.code.point(index), donors, loaded.code);
    write_fragment_file(fs::path(outdir) / fragment_name(index),
                        make_header(loaded.code, index, loaded.object_bytes,
                                    loaded.stripe_count),
                        repaired.values);
  }
  return 0;
}

int cmd_pairs(int m, int k, int n, std::uint32_t target, const std::string& modulus,
              const std::string& out) {
  const Code code = make_cli_code(m, modulus, k, n);
  const PairTable table = pair_table(code.field().element(target), code);
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : table.pairs) {
    pairs.push_back({a.bits(), b.bits()});
  }
  nlohmann::json doc{{"m", m},
                     {"k", k},
                     {"n", n},
                     {"target", target},
                     {"diversity", table.pairs.size()},
                     {"pairs", std::move(pairs)}};
  Sink sink(out);
  *sink.os << doc.dump(2) << '\n';
  return 0;
}

std::vector<double> parse_pfrag_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t colon = text.find(':', start);
    const std::string piece =
        text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    parts.push_back(std::stod(piece));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() != 3) throw std::invalid_argument("--pfrag expects P or A:B:STEP");
  const double a = parts[0], b = parts[1], step = parts[2];
  if (step <= 0 || b < a) throw std::invalid_argument("--pfrag range must satisfy a<=b, step>0");
  std::vector<double> values;
  for (double p = a; p <= b + step * 1e-9; p += step) values.push_back(p);
  return values;
}

int cmd_resilience(int n, int k, const std::string& pfrag, long trials, std::uint64_t seed,
                   const std::string& mode, int m, const std::string& modulus,
                   const std::string& out) {
  const bool analytic = mode == "analytic" || mode == "both";
  const bool sim = mode == "sim" || mode == "both";
  const int d = subspace_dimension(n);
  std::optional<Code> code;
  if (sim) {
    int degree = m;
    if (degree == 0) {
      for (int candidate : {2, 4, 8, 16}) {
        if (candidate >= d && (1ull << (k - 1)) + 1 <= (1ull << candidate) - 1) {
          degree = candidate;
          break;
        }
      }
      if (degree == 0) throw std::invalid_argument("no built-in field fits; pass --m");
    }
    code = make_cli_code(degree, modulus, k, n);
  }
  std::vector<ResilienceRow> rows;
  for (double p : parse_pfrag_range(pfrag)) {
    ResilienceRow row{};
    row.p_frag = p;
    if (analytic) {
      row.p_obj_src = p_obj_src(n, k, p);
      row.p_obj_ec = p_obj_ec(n, k, p);
    }
    if (sim) {
      const McResult mc = simulate_p_obj(*code, p, trials, seed);
      row.mc_estimate = mc.estimate;
      row.mc_stderr = mc.std_error;
    }
    rows.push_back(row);
  }
  Sink sink(out);
  write_resilience_csv(*sink.os, rows, n, k, trials, seed);
  return 0;
}

int cmd_bandwidth(int n, int k, const std::string& out) {
  const auto rows = traffic_table(n, k);
  Sink sink(out);
  write_traffic_csv(*sink.os, rows, n, k);
  return 0;
}

int cmd_schedule(int m, int k, int n, const std::vector<int>& missing,
                 const std::string& modulus, const std::string& out) {
  const Code code = make_cli_code(m, modulus, k, n);
  ClusterState state;
  const std::set<int> missing_set(missing.begin(), missing.end());
  state.missing.assign(missing_set.begin(), missing_set.end());
  for (int index = 1; index <= code.n(); ++index) {
    if (!missing_set.count(index)) state.available.push_back(index);
  }
  const RepairSchedule schedule = plan_repairs(code, state);
  std::string why;
  if (!verify_schedule(code, state, schedule, &why)) {
    throw std::logic_error("generated schedule failed verification: " + why);
  }
  Sink sink(out);
  *sink.os << schedule_to_json(schedule, sequential_baselines(code, state)).dump(2) << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"homomorphic self-repairing code toolkit"};
  app.require_subcommand(1);

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "split a file into n fragment files");
  std::string in, outdir, modulus, out;
  int m = 0, k = 0, n = 0;
  encode_cmd->add_option("--in", in, "input file")->required();
  encode_cmd->add_option("--outdir", outdir, "fragment output directory")->required();
  encode_cmd->add_option("--m", m, "field degree (bits per symbol)")->required();
  encode_cmd->add_option("--k", k, "data symbols per stripe")->required();
  encode_cmd->add_option("--n", n, "fragment count, n = 2^d - 1")->required();
  encode_cmd->add_option("--modulus", modulus, "field modulus bits, e.g. 0x13");

  auto* decode_cmd = app.add_subcommand("decode", "rebuild the file from fragment files");
  std::vector<std::string> files;
  decode_cmd->add_option("--out", out, "output file")->required();
  decode_cmd->add_option("files", files, "fragment files")->required();

  auto* repair_cmd = app.add_subcommand("repair", "recreate missing fragment files by XOR");
  repair_cmd->add_option("--outdir", outdir, "directory for repaired fragments")->required();
  repair_cmd->add_option("files", files, "surviving fragment files")->required();

  auto* pairs_cmd = app.add_subcommand("pairs", "list the disjoint repair pairs of a fragment");
  std::uint32_t target = 0;
  pairs_cmd->add_option("--m", m, "field degree")->required();
  pairs_cmd->add_option("--k", k, "data symbols")->required();
  pairs_cmd->add_option("--n", n, "fragment count")->required();
  pairs_cmd->add_option("--target", target, "evaluation point (coordinate bits)")->required();
  pairs_cmd->add_option("--modulus", modulus, "field modulus bits");
  pairs_cmd->add_option("--out", out, "write JSON here instead of stdout");

  auto* res_cmd = app.add_subcommand("resilience", "object availability table (CSV)");
  std::string pfrag, mode = "both";
  long trials = 100000;
  std::uint64_t seed = 1;
  res_cmd->add_option("--n", n, "fragment count")->required();
  res_cmd->add_option("--k", k, "data symbols")->required();
  res_cmd->add_option("--pfrag", pfrag, "fragment availability P or range A:B:STEP")->required();
  res_cmd->add_option("--trials", trials, "Monte Carlo trials");
  res_cmd->add_option("--seed", seed, "Monte Carlo seed");
  res_cmd->add_option("--mode", mode, "analytic|sim|both")
      ->check(CLI::IsMember({"analytic", "sim", "both"}));
  res_cmd->add_option("--m", m, "field degree for simulation (default: smallest built-in)");
  res_cmd->add_option("--modulus", modulus, "field modulus bits");
  res_cmd->add_option("--out", out, "write CSV here instead of stdout");

  auto* bw_cmd = app.add_subcommand("bandwidth", "repair-traffic table (CSV)");
  bw_cmd->add_option("--n", n, "fragment count")->required();
  bw_cmd->add_option("--k", k, "data symbols")->required();
  bw_cmd->add_option("--out", out, "write CSV here instead of stdout");

  auto* sched_cmd = app.add_subcommand("schedule", "plan parallel repairs (JSON)");
  std::vector<int> missing;
  sched_cmd->add_option("--m", m, "field degree")->required();
  sched_cmd->add_option("--k", k, "data symbols")->required();
  sched_cmd->add_option("--n", n, "fragment count")->required();
  sched_cmd->add_option("--missing", missing, "missing fragment indices")
      ->required()
      ->delimiter(',');
  sched_cmd->add_option("--modulus", modulus, "field modulus bits");
  sched_cmd->add_option("--out", out, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (encode_cmd->parsed()) return cmd_encode(in, outdir, m, k, n, modulus);
    if (decode_cmd->parsed()) return cmd_decode(out, files);
    if (repair_cmd->parsed()) return cmd_repair(outdir, files);
    if (pairs_cmd->parsed()) return cmd_pairs(m, k, n, target, modulus, out);
    if (res_cmd->parsed())
      return cmd_resilience(n, k, pfrag, trials, seed, mode, m, modulus, out);
    if (bw_cmd->parsed()) return cmd_bandwidth(n, k, out);
    if (sched_cmd->parsed()) return cmd_schedule(m, k, n, missing, modulus, out);
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const FormatError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    // invalid_argument, domain_error, filesystem errors: all usage-level
    std::cerr << e.what() << '\n';
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> with_name;
  with_name.reserve(args.size() + 1);
  with_name.push_back("hsrc");
  with_name.insert(with_name.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(with_name.size());
  for (const std::string& a : with_name) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hsrc::cli
