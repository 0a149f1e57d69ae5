#include "qdesign/sweep.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "qdesign/curves.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/group_actions.hpp"
#include "qdesign/parallel.hpp"

namespace qdesign {

namespace {

constexpr std::uint64_t kSweepCurveCost = 200'000'000;      // q^3 over all (alpha, beta)
constexpr std::uint64_t kSweepOrbitMembers = 400'000'000;  // group order * k

const std::vector<std::pair<std::string, SweepOp>>& op_names() {
  static const std::vector<std::pair<std::string, SweepOp>> names = {
      {"bluher", SweepOp::bluher},           {"image", SweepOp::image},
      {"design", SweepOp::design},           {"stabilizer", SweepOp::stabilizer},
      {"curves", SweepOp::curves},           {"homogeneity", SweepOp::homogeneity},
      {"equality", SweepOp::equality},
  };
  return names;
}

std::string to_string(DesignMode m) {
  switch (m) {
    case DesignMode::automatic: return "auto";
    case DesignMode::exact: return "exact";
    case DesignMode::sampled: return "sampled";
  }
  return "auto";
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void check_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where) {
  for (auto&& [key, _] : t)
    if (!allowed.count(std::string(key.str()))) fail(where, "unknown key '" + std::string(key.str()) + "'");
}

std::uint64_t get_uint(const toml::node& n, const std::string& where) {
  const auto v = n.value<std::int64_t>();
  if (!n.is_integer() || !v || *v < 0) fail(where, "expected a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

std::vector<std::uint64_t> get_uints(const toml::node& n, const std::string& where) {
  std::vector<std::uint64_t> out;
  if (const auto* arr = n.as_array()) {
    if (arr->empty()) fail(where, "empty array");
    for (const auto& e : *arr) out.push_back(get_uint(e, where));
  } else {
    out.push_back(get_uint(n, where));
  }
  return out;
}

std::vector<SweepOp> get_ops(const toml::node& n, const std::string& where) {
  const auto* arr = n.as_array();
  if (!arr) fail(where, "ops must be an array of strings");
  std::vector<SweepOp> ops;
  for (const auto& e : *arr) {
    const auto s = e.value<std::string>();
    if (!e.is_string()) fail(where, "ops must be an array of strings");
    auto it = std::find_if(op_names().begin(), op_names().end(), [&](auto& p) { return p.first == *s; });
    if (it == op_names().end()) fail(where, "unknown op '" + *s + "'");
    if (std::find(ops.begin(), ops.end(), it->second) == ops.end()) ops.push_back(it->second);
  }
  return ops;
}

DesignMode get_mode(const toml::node& n, const std::string& where) {
  const auto s = n.value<std::string>();
  if (!n.is_string()) fail(where, "mode must be a string");
  if (*s == "auto") return DesignMode::automatic;
  if (*s == "exact") return DesignMode::exact;
  if (*s == "sampled") return DesignMode::sampled;
  fail(where, "mode must be auto, exact or sampled");
}

struct Defaults {
  std::vector<SweepOp> ops = {SweepOp::bluher, SweepOp::image, SweepOp::design};
  DesignMode mode = DesignMode::automatic;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  bool force = false;
};

// Reads the overridable keys; key validation is the caller's job.
void read_defaults(const toml::table& t, Defaults& d, const std::string& where) {
  if (auto n = t.get("ops")) d.ops = get_ops(*n, where + ".ops");
  if (auto n = t.get("mode")) d.mode = get_mode(*n, where + ".mode");
  if (auto n = t.get("samples")) d.samples = get_uint(*n, where + ".samples");
  if (auto n = t.get("seed")) d.seed = get_uint(*n, where + ".seed");
  if (auto n = t.get("force")) {
    if (!n->is_boolean()) fail(where + ".force", "expected a boolean");
    d.force = *n->value<bool>();
  }
  if (d.samples == 0) fail(where + ".samples", "must be positive");
}

void expand_entry(const toml::table& t, const Defaults& defaults, const std::string& where,
                  std::vector<SweepEntry>& out) {
  check_keys(t, {"p", "m", "l", "ops", "mode", "samples", "seed", "force"}, where);
  for (const char* key : {"p", "m", "l"})
    if (!t.contains(key)) fail(where, std::string("missing key '") + key + "'");
  Defaults d = defaults;
  read_defaults(t, d, where);

  const auto ps = get_uints(*t.get("p"), where + ".p");
  const auto ms = get_uints(*t.get("m"), where + ".m");
  const toml::node& lnode = *t.get("l");
  const auto lword = lnode.value<std::string>();
  if (lnode.is_string() && *lword != "all" && *lword != "coprime")
    fail(where + ".l", "must be an integer, an array, \"all\" or \"coprime\"");

  for (auto p : ps)
    for (auto m : ms) {
      std::vector<std::uint64_t> ls;
      if (lnode.is_string()) {
        for (std::uint64_t l = 1; l < m; ++l)
          if (*lword == "all" || std::gcd(l, m) == 1) ls.push_back(l);
      } else {
        ls = get_uints(lnode, where + ".l");
      }
      for (auto l : ls) {
        if (p > UINT32_MAX || m > UINT32_MAX || l > UINT32_MAX) fail(where, "parameter out of range");
        SweepEntry e;
        try {
          e.spec = FamilySpec::make(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(m),
                                    static_cast<std::uint32_t>(l));
        } catch (const std::invalid_argument& ex) {
          fail(where + " (p=" + std::to_string(p) + ", m=" + std::to_string(m) + ", l=" + std::to_string(l) + ")",
               ex.what());
        }
        e.ops = d.ops;
        e.mode = d.mode;
        e.samples = d.samples;
        e.seed = d.seed;
        e.force = d.force;
        out.push_back(e);
      }
    }
}

}  // namespace

std::string to_string(SweepOp op) {
  for (auto& [name, o] : op_names())
    if (o == op) return name;
  return "unknown";
}

SweepConfig parse_sweep_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
  check_keys(root, {"name", "output_dir", "threads", "defaults", "budget", "entry"}, "config");

  SweepConfig c;
  if (auto n = root.get("name")) {
    if (!n->is_string()) fail("name", "expected a string");
    c.name = *n->value<std::string>();
  }
  if (auto n = root.get("output_dir")) {
    if (!n->is_string()) fail("output_dir", "expected a string");
    c.output_dir = *n->value<std::string>();
  }
  if (auto n = root.get("threads")) {
    const auto v = get_uint(*n, "threads");
    if (v == 0 || v > 4096) fail("threads", "must be in 1..4096");
    c.threads = static_cast<unsigned>(v);
  }

  Defaults defaults;
  if (auto n = root.get("defaults")) {
    if (!n->is_table()) fail("defaults", "expected a table");
    check_keys(*n->as_table(), {"ops", "mode", "samples", "seed", "force"}, "defaults");
    read_defaults(*n->as_table(), defaults, "defaults");
  }
  if (auto n = root.get("budget")) {
    if (!n->is_table()) fail("budget", "expected a table");
    const auto& t = *n->as_table();
    check_keys(t, {"exact_increments", "member_budget", "group_order"}, "budget");
    if (auto v = t.get("exact_increments")) c.increment_budget = get_uint(*v, "budget.exact_increments");
    if (auto v = t.get("member_budget")) c.member_budget = get_uint(*v, "budget.member_budget");
    if (auto v = t.get("group_order")) c.group_order_budget = get_uint(*v, "budget.group_order");
  }

  if (auto n = root.get("entry")) {
    const auto* arr = n->as_array();
    if (!arr || !arr->is_array_of_tables()) fail("entry", "expected [[entry]] tables");
    std::size_t i = 0;
    for (const auto& e : *arr) expand_entry(*e.as_table(), defaults, "entry[" + std::to_string(i++) + "]", c.entries);
  }
  if (c.entries.empty()) throw ConfigError("config contains no entries");
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_sweep_config(text.str());
}

namespace {

struct OpResult {
  std::string status = "skipped";  // pass | fail | finding | skipped
  std::string note;
  json data = json::object();
};

OpResult status_of(CheckStatus s) {
  OpResult r;
  r.status = to_string(s);
  return r;
}

OpResult run_bluher(const FieldCtx& ctx, const FamilySpec& spec) {
  const auto b = bluher_bruteforce(ctx, spec);
  OpResult r;
  r.data = to_json(b);
  if (b.predicted) {
    r.status = b.agrees ? "pass" : "fail";
    r.note = b.agrees ? "brute force matches the closed form" : "brute force disagrees with the closed form";
  } else {
    r.note = "gcd(l, m) != 1: no closed form; brute-forced count recorded";
  }
  return r;
}

OpResult run_image(const FieldCtx& ctx, const FamilySpec& spec) {
  const auto size = image_set(ctx, spec).size();
  const auto b = bluher_bruteforce(ctx, spec);
  const bool complement = size == spec.q() - b.brute_forced;
  OpResult r;
  r.data = {{"image_size", size}, {"q_minus_rootless", spec.q() - b.brute_forced}, {"complement_holds", complement}};
  bool ok = complement;
  if (spec.coprime()) {
    const auto k = predicted_k(spec);
    r.data["predicted"] = k;
    ok = ok && size == k;
  } else {
    r.data["predicted"] = nullptr;
  }
  r.status = ok ? "pass" : "fail";
  if (!complement) r.note = "|B_l| != q - rootless count";
  else if (!ok) r.note = "|B_l| differs from the closed form";
  return r;
}

OpResult run_design(const FamilySpec& spec, const SweepEntry& e, const SweepConfig& c, unsigned threads) {
  CheckOptions opts;
  opts.threads = threads;
  opts.force = e.force;
  opts.increment_budget = c.increment_budget;
  opts.build.member_budget = c.member_budget;
  VerifyMode mode = ExactMode{};
  if (e.mode == DesignMode::sampled) mode = SampledMode{e.samples, e.seed};
  if (e.mode == DesignMode::automatic) opts.fallback = SampledMode{e.samples, e.seed};
  const auto cr = check_case(spec, mode, opts);
  OpResult r = status_of(cr.status);
  r.note = cr.note;
  r.data = to_json(cr);
  return r;
}

bool design_group_is_qr(const FamilySpec& spec) { return spec.p % 4 == 3 && spec.m % 2 == 1; }

OpResult run_stabilizer(const FieldCtx& ctx, const FamilySpec& spec, const SweepConfig& c, unsigned threads) {
  const auto variant = design_group_is_qr(spec) ? GroupVariant::qr : GroupVariant::full;
  const AffineGroup group(ctx, variant);
  const Block base = image_set(ctx, spec);
  GroupBudget budget;
  budget.max_group_order = c.group_order_budget;
  const auto st = stabilizer(group, base, threads, budget);
  OpResult r;
  r.data = to_json(st);
  r.data["group"] = to_string(variant);
  r.data["group_order"] = group.order();

  bool ok = group.order() % st.mu == 0 && is_subgroup(ctx, st.elements);
  if (group.order() * base.size() <= kSweepOrbitMembers) {
    const auto orb = orbit(group, base, threads, budget);
    r.data["orbit_size"] = orb.size();
    const bool os = orb.size() * st.mu == group.order();
    r.data["orbit_stabilizer_holds"] = os;
    ok = ok && os;
  } else {
    r.data["orbit_size"] = nullptr;
    r.note = "orbit not materialized (above budget); ";
  }
  const auto pred = classify_case(spec);
  if (!ok) {
    r.status = "fail";
    r.note += "stabilizer is not a subgroup of the expected index";
  } else if (pred.trivial_stabilizer_expected) {
    r.status = st.mu == 1 ? "pass" : "fail";
    r.note += st.mu == 1 ? "trivial stabilizer, as required" : "stabilizer should be trivial";
  } else if (pred.range == RangeFlag::conjecture1 || pred.range == RangeFlag::conjecture2) {
    r.status = "finding";
    r.note += "mu = " + std::to_string(st.mu) + (st.mu == 1 ? " (trivial)" : " (nontrivial)");
  } else {
    r.status = "pass";
    r.note += "mu = " + std::to_string(st.mu);
  }
  return r;
}

OpResult run_curves(const FieldCtx& ctx, const FamilySpec& spec) {
  const std::uint64_t q = ctx.order();
  OpResult r;
  if (q * q * q > kSweepCurveCost) {
    r.note = "all-curve enumeration above budget";
    return r;
  }
  std::uint64_t checked = 0, failed = 0, projective_checked = 0;
  std::map<std::string, std::uint64_t> kinds;
  json failures = json::array();
  for (std::uint32_t a = 1; a < q; ++a)
    for (std::uint32_t b = 0; b < q; ++b) {
      const CurveSpec curve{spec, {a}, {b}};
      const auto cr = certify_bounds(ctx, curve);
      ++checked;
      ++kinds[to_string(cr.primary.kind)];
      if (cr.projective_is_q_plus_1) ++projective_checked;
      if (!cr.within_bounds) {
        ++failed;
        if (failures.size() < 8) {
          json f = to_json(cr);
          f["alpha"] = a;
          f["beta"] = b;
          failures.push_back(f);
        }
      }
    }
  r.status = failed == 0 ? "pass" : "fail";
  r.note = std::to_string(checked - failed) + "/" + std::to_string(checked) + " curves within bounds";
  r.data = {{"curves", checked},
            {"violations", failed},
            {"projective_checked", projective_checked},
            {"primary_kinds", kinds},
            {"failures", failures}};
  return r;
}

OpResult run_homogeneity(const FieldCtx& ctx) {
  OpResult r;
  const std::uint64_t q = ctx.order();
  GroupBudget budget;
  if (q > budget.max_homogeneity_q) {
    r.note = "q above the homogeneity budget";
    return r;
  }
  const auto full = is_2_homogeneous(AffineGroup(ctx, GroupVariant::full), budget);
  r.data["full"] = to_json(full);
  bool ok = full.homogeneous;
  if (q % 2 == 1) {
    const auto qr = is_2_homogeneous(AffineGroup(ctx, GroupVariant::qr), budget);
    r.data["qr"] = to_json(qr);
    // -1 is a non-square exactly when q = 3 mod 4.
    ok = ok && qr.homogeneous == (q % 4 == 3);
  }
  r.status = ok ? "pass" : "fail";
  return r;
}

OpResult run_equality(const FamilySpec& spec, unsigned threads) {
  OpResult r;
  if (spec.q() > kEqualityMaxQ) {
    r.note = "q above the block-set equality budget";
    return r;
  }
  const auto eq = block_set_equality(spec, threads);
  r.data = to_json(eq);
  const bool even_case = spec.p == 2 && spec.coprime();
  const bool odd_case = spec.p % 4 == 3 && spec.m % 2 == 1 && spec.coprime();
  if (even_case) {
    r.status = eq.a1_eq_a2 ? "pass" : "fail";
    r.note = eq.a1_eq_a2 ? "A1 = A2" : "A1 != A2";
  } else if (odd_case) {
    const bool ok = eq.a1_eq_a3.value_or(false);
    r.status = ok ? "pass" : "fail";
    r.note = ok ? "A1 = A3" : "A1 != A3";
  } else {
    r.status = "finding";
    r.note = "no equality is predicted for these parameters";
  }
  return r;
}

struct EntryOutcome {
  json result;
  std::string status;
  double seconds = 0;
  std::map<std::string, std::string> op_status;
};

int severity(const std::string& s) {
  if (s == "fail") return 3;
  if (s == "finding") return 2;
  if (s == "pass") return 1;
  return 0;
}

EntryOutcome run_entry(const SweepEntry& e, const SweepConfig& c, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  EntryOutcome out;
  const FieldCtx ctx = make_field(e.spec);
  json ops = json::object();
  std::string worst = "skipped";
  for (SweepOp op : e.ops) {
    OpResult r;
    try {
      switch (op) {
        case SweepOp::bluher: r = run_bluher(ctx, e.spec); break;
        case SweepOp::image: r = run_image(ctx, e.spec); break;
        case SweepOp::design: r = run_design(e.spec, e, c, threads); break;
        case SweepOp::stabilizer: r = run_stabilizer(ctx, e.spec, c, threads); break;
        case SweepOp::curves: r = run_curves(ctx, e.spec); break;
        case SweepOp::homogeneity: r = run_homogeneity(ctx); break;
        case SweepOp::equality: r = run_equality(e.spec, threads); break;
      }
    } catch (const BudgetError& ex) {
      r = OpResult{"skipped", std::string("over budget: ") + ex.what(), json::object()};
    } catch (const EmptyStructureError& ex) {
      r = OpResult{"skipped", ex.what(), json::object()};
    } catch (const std::exception& ex) {
      r = OpResult{"fail", std::string("error: ") + ex.what(), json::object()};
    }
    ops[to_string(op)] = {{"status", r.status}, {"note", r.note}, {"result", r.data}};
    out.op_status[to_string(op)] = r.status;
    if (severity(r.status) > severity(worst)) worst = r.status;
  }
  out.status = worst;
  out.result = {{"spec", to_json(e.spec)},
                {"field", to_json(ctx)},
                {"prediction", to_json(classify_case(e.spec))},
                {"mode", to_string(e.mode)},
                {"seed", e.seed},
                {"samples", e.samples},
                {"force", e.force},
                {"ops", ops},
                {"status", worst}};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

json config_json(const SweepConfig& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    json ops = json::array();
    for (auto op : e.ops) ops.push_back(to_string(op));
    entries.push_back({{"p", e.spec.p},
                       {"m", e.spec.m},
                       {"l", e.spec.l},
                       {"ops", ops},
                       {"mode", to_string(e.mode)},
                       {"samples", e.samples},
                       {"seed", e.seed},
                       {"force", e.force}});
  }
  return {{"name", c.name},
          {"budget",
           {{"exact_increments", c.increment_budget},
            {"member_budget", c.member_budget},
            {"group_order", c.group_order_budget}}},
          {"entries", entries}};
}

std::string opt_str(const json& j) { return j.is_null() ? "-" : j.dump(); }

std::string render_table(const SweepConfig& c, const std::vector<EntryOutcome>& outcomes) {
  std::ostringstream t;
  t << std::left << std::setw(22) << "spec" << std::setw(17) << "range" << std::setw(16) << "k pred/emp"
    << std::setw(24) << "lambda pred/emp" << std::setw(22) << "b pred/emp" << std::setw(6) << "mu"
    << std::setw(9) << "status"
    << "ops\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& r = outcomes[i].result;
    const auto& pred = r["prediction"];
    const auto& ops = r["ops"];
    std::string k_emp = "-", l_emp = "-", b_emp = "-", mu = "-";
    if (ops.contains("image")) k_emp = opt_str(ops["image"]["result"].value("image_size", json()));
    if (ops.contains("design") && ops["design"]["result"].contains("design")) {
      const auto& d = ops["design"]["result"]["design"];
      l_emp = d["is_design"].get<bool>() ? opt_str(d["lambda"]) : "none";
      b_emp = opt_str(d["b"]);
    }
    if (ops.contains("stabilizer") && ops["stabilizer"]["result"].contains("mu"))
      mu = opt_str(ops["stabilizer"]["result"]["mu"]);
    std::string op_list;
    for (auto& [name, status] : outcomes[i].op_status) op_list += name + "=" + status + " ";
    t << std::setw(22) << to_string(c.entries[i].spec) << std::setw(17) << pred["range"].get<std::string>()
      << std::setw(16) << (opt_str(pred["k"]) + "/" + k_emp) << std::setw(24)
      << (opt_str(pred["lambda"]) + "/" + l_emp) << std::setw(22) << (opt_str(pred["b"]) + "/" + b_emp)
      << std::setw(6) << mu << std::setw(9) << outcomes[i].status << op_list << "\n";
  }
  return t.str();
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, unsigned threads) {
  if (config.entries.empty()) throw ConfigError("config contains no entries");
  threads = std::max(1u, threads);
  const std::size_t n = config.entries.size();
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  const unsigned inner = std::max(1u, threads / workers);

  const auto start = std::chrono::steady_clock::now();
  std::vector<EntryOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};
  parallel_chunks(workers, workers, [&](unsigned, std::uint64_t, std::uint64_t) {
    for (std::size_t i = next++; i < n; i = next++) outcomes[i] = run_entry(config.entries[i], config, inner);
  });

  SweepResult result;
  json entries = json::array();
  json entry_times = json::array();
  std::map<std::string, std::uint64_t> by_status;
  std::map<std::string, std::map<std::string, std::uint64_t>> by_op;
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back(outcomes[i].result);
    entry_times.push_back({{"spec", to_string(config.entries[i].spec)}, {"seconds", outcomes[i].seconds}});
    ++by_status[outcomes[i].status];
    for (auto& [op, s] : outcomes[i].op_status) ++by_op[op][s];
    result.hard_failure = result.hard_failure || outcomes[i].status == "fail";
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.report = document({{"tool_version", kToolVersion},
                            {"config", config_json(config)},
                            {"entries", entries},
                            {"summary",
                             {{"entries", n},
                              {"by_status", by_status},
                              {"by_op", by_op},
                              {"hard_failure", result.hard_failure}}},
                            {"timings", {{"total_seconds", total}, {"threads", threads}, {"entries", entry_times}}}});
  result.table = render_table(config, outcomes);
  return result;
}

}  // namespace qdesign
