#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>

#include "qdesign/curves.hpp"
#include "qdesign/errors.hpp"
#include "qdesign/group_actions.hpp"
#include "qdesign/parallel.hpp"
#include "qdesign/quadratic_family.hpp"
#include "qdesign/report.hpp"
#include "qdesign/sweep.hpp"

namespace qdesign {

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Args {
  std::uint32_t p = 0, m = 0, l = 0;
  std::optional<std::uint64_t> k;
  unsigned t = 2;
  std::string mode = "auto";
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  bool force = false;
  unsigned threads = 0;
  std::uint64_t alpha = 1, beta = 0;
  std::string group = "auto";
  std::string output;
  std::string config;
  bool blocks = false;
};

void add_family(CLI::App* cmd, Args& a, bool with_l = true) {
  cmd->add_option("-p", a.p, "characteristic (prime)")->required();
  cmd->add_option("-m", a.m, "extension degree")->required();
  if (with_l) cmd->add_option("-l", a.l, "exponent parameter, f(x) = x^(p^l+1)")->required();
}

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--threads", a.threads, "worker cap (default: QDESIGN_THREADS or all cores)");
  cmd->add_option("-o,--output", a.output, "write the report here instead of stdout");
}

void add_group(CLI::App* cmd, Args& a) {
  cmd->add_option("--group", a.group, "full, qr, or auto (qr when p = 3 mod 4 and m is odd)")
      ->check(CLI::IsMember({"auto", "full", "qr"}));
}

FamilySpec spec_of(const Args& a) { return FamilySpec::make(a.p, a.m, a.l); }

unsigned threads_of(const Args& a) { return a.threads > 0 ? a.threads : default_threads(); }

GroupVariant group_of(const Args& a, const FamilySpec& spec) {
  if (a.group == "full") return GroupVariant::full;
  if (a.group == "qr") return GroupVariant::qr;
  return spec.p % 4 == 3 && spec.m % 2 == 1 ? GroupVariant::qr : GroupVariant::full;
}

void emit(const Args& a, const std::string& text, std::ostream& out) {
  if (a.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(a.output);
  if (!f) throw std::invalid_argument("cannot write " + a.output);
  f << text;
}

void emit_json(const Args& a, const json& body, std::ostream& out) { emit(a, document(body).dump(2) + "\n", out); }

int cmd_field(const Args& a, std::ostream& out) {
  const FieldCtx ctx(a.p, a.m);
  json j = to_json(ctx);
  j["tables"] = ctx.has_tables();
  emit_json(a, j, out);
  return kOk;
}

int cmd_spectrum(const Args& a, std::ostream& out, std::ostream& err) {
  const auto spec = spec_of(a);
  const auto ctx = make_field(spec);
  const auto s = value_spectrum(ctx, family_map(ctx, spec));
  emit(a, spectrum_csv(s), out);
  err << "q=" << ctx.order() << " pairs=" << s.total() << " |B_l|=" << image_set(ctx, spec).size()
      << " modulus=" << json(ctx.modulus()).dump() << "\n";
  return kOk;
}

int cmd_verify(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  const unsigned threads = threads_of(a);
  VerifyMode mode = ExactMode{};
  std::optional<SampledMode> fallback;
  if (a.mode == "sampled") mode = SampledMode{a.samples, a.seed};
  if (a.mode == "auto") fallback = SampledMode{a.samples, a.seed};

  if (a.t != 2) {
    const auto ctx = make_field(spec);
    const std::uint64_t k = a.k.value_or(image_set(ctx, spec).size());
    const auto s = build_structure(ctx, family_map(ctx, spec), k);
    const auto inc = exact_increments(s, a.t);
    if (std::holds_alternative<ExactMode>(mode) && inc > kExactIncrementBudget && !a.force) {
      if (!fallback) throw BudgetError("exact verification above the increment budget; use --force");
      mode = *fallback;
    }
    const auto d = verify_t_design(s, a.t, mode, threads);
    emit_json(a, {{"spec", to_json(spec)}, {"field", to_json(ctx)}, {"design", to_json(d)}, {"increments", inc}},
              out);
    return kOk;
  }

  CheckOptions opts;
  opts.threads = threads;
  opts.force = a.force;
  opts.fallback = fallback;
  const auto r = a.k ? check_case(spec, *a.k, mode, opts) : check_case(spec, mode, opts);
  json j = to_json(r);
  j["field"] = to_json(make_field(spec));
  emit_json(a, j, out);
  return r.status == CheckStatus::fail ? kViolation : kOk;
}

int cmd_bluher(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  const auto ctx = make_field(spec);
  const auto r = bluher_bruteforce(ctx, spec);
  json j = to_json(r);
  j["spec"] = to_json(spec);
  j["image_size"] = image_set(ctx, spec).size();
  j["predicted_k"] = spec.coprime() ? json(predicted_k(spec)) : json(nullptr);
  emit_json(a, j, out);
  return r.predicted && !r.agrees ? kViolation : kOk;
}

int cmd_stabilizer(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  const auto ctx = make_field(spec);
  const AffineGroup group(ctx, group_of(a, spec));
  const auto st = stabilizer(group, image_set(ctx, spec), threads_of(a));
  const auto pred = classify_case(spec);
  json j = to_json(st);
  j["spec"] = to_json(spec);
  j["group"] = to_string(group.variant);
  j["group_order"] = group.order();
  j["is_subgroup"] = is_subgroup(ctx, st.elements);
  j["trivial_stabilizer_expected"] = pred.trivial_stabilizer_expected;
  emit_json(a, j, out);
  const bool violated = !is_subgroup(ctx, st.elements) || (pred.trivial_stabilizer_expected && st.mu != 1);
  return violated ? kViolation : kOk;
}

int cmd_orbit(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  const auto ctx = make_field(spec);
  const AffineGroup group(ctx, group_of(a, spec));
  const Block base = image_set(ctx, spec);
  const auto orb = orbit(group, base, threads_of(a));
  json j = {{"spec", to_json(spec)},
            {"group", to_string(group.variant)},
            {"group_order", group.order()},
            {"base_size", base.size()},
            {"orbit_size", orb.size()}};
  if (a.blocks) {
    json blocks = json::array();
    for (const auto& b : orb) blocks.push_back(std::vector<Point>(b.members().begin(), b.members().end()));
    j["blocks"] = blocks;
  }
  emit_json(a, j, out);
  return group.order() % orb.size() == 0 ? kOk : kViolation;
}

int cmd_homogeneity(const Args& a, std::ostream& out) {
  const FieldCtx ctx(a.p, a.m);
  const auto variant = a.group == "qr" ? GroupVariant::qr : GroupVariant::full;
  const AffineGroup group(ctx, variant);
  const auto r = is_2_homogeneous(group);
  json j = to_json(r);
  j["field"] = to_json(ctx);
  j["group"] = to_string(variant);
  j["group_order"] = group.order();
  emit_json(a, j, out);
  // The full group is always 2-homogeneous; the square-multiplier group is
  // exactly when -1 is a non-square.
  const bool expected = variant == GroupVariant::full || ctx.order() % 4 == 3;
  return r.homogeneous == expected ? kOk : kViolation;
}

int cmd_equality(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  if (spec.q() > kEqualityMaxQ) throw BudgetError("block-set equality is limited to q <= 2048");
  const auto r = block_set_equality(spec, threads_of(a));
  json j = to_json(r);
  j["spec"] = to_json(spec);
  emit_json(a, j, out);
  bool violated = false;
  if (spec.p == 2 && spec.coprime()) violated = !r.a1_eq_a2;
  if (spec.p % 4 == 3 && spec.m % 2 == 1 && spec.coprime()) violated = !r.a1_eq_a3.value_or(false);
  return violated ? kViolation : kOk;
}

int cmd_curve(const Args& a, std::ostream& out) {
  const auto spec = spec_of(a);
  const auto ctx = make_field(spec);
  if (a.alpha == 0) throw std::invalid_argument("alpha must be nonzero");
  const CurveSpec curve{spec, ctx.element(a.alpha), ctx.element(a.beta)};
  const auto r = certify_bounds(ctx, curve);
  json j = to_json(r);
  j["spec"] = to_json(spec);
  j["field"] = to_json(ctx);
  j["alpha"] = a.alpha;
  j["beta"] = a.beta;
  emit_json(a, j, out);
  return r.within_bounds ? kOk : kViolation;
}

int cmd_sweep(const Args& a, std::ostream& out, std::ostream& err) {
  const auto config = load_sweep_config(a.config);
  const unsigned threads = a.threads > 0 ? a.threads : config.threads.value_or(default_threads());
  const auto result = run_sweep(config, threads);
  std::filesystem::path target;
  if (!a.output.empty())
    target = a.output;
  else if (config.output_dir)
    target = std::filesystem::path(*config.output_dir) / (config.name + ".json");
  if (target.empty()) {
    err << result.table;
    out << result.report.dump(2) << "\n";
  } else {
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::ofstream f(target);
    if (!f) throw std::invalid_argument("cannot write " + target.string());
    f << result.report.dump(2) << "\n";
    out << result.table << "report: " << target.string() << "\n";
  }
  return result.hard_failure ? kViolation : kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Designs from the quadratic family x^(p^l+1) over GF(p^m)", "qdesign"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Args a;
  std::function<int()> run;

  auto* field = app.add_subcommand("field", "field construction parameters");
  add_family(field, a, false);
  add_common(field, a);
  field->callback([&] { run = [&] { return cmd_field(a, out); }; });

  auto* spectrum = app.add_subcommand("spectrum", "block-size spectrum as CSV");
  add_family(spectrum, a);
  add_common(spectrum, a);
  spectrum->callback([&] { run = [&] { return cmd_spectrum(a, out, err); }; });

  auto* verify = app.add_subcommand("verify", "build and verify the incidence structure");
  add_family(verify, a);
  add_common(verify, a);
  verify->add_option("-k", a.k, "block size (default |B_l|)");
  verify->add_option("-t", a.t, "strength")->check(CLI::Range(1u, 3u));
  verify->add_option("--mode", a.mode, "exact, sampled, or auto")->check(CLI::IsMember({"exact", "sampled", "auto"}));
  verify->add_option("--samples", a.samples, "samples in sampled mode")->check(CLI::PositiveNumber);
  verify->add_option("--seed", a.seed, "sampling seed");
  verify->add_flag("--force", a.force, "allow exact mode above the increment budget");
  verify->callback([&] { run = [&] { return cmd_verify(a, out); }; });

  auto* bluher = app.add_subcommand("bluher", "rootless count against the closed form");
  add_family(bluher, a);
  add_common(bluher, a);
  bluher->callback([&] { run = [&] { return cmd_bluher(a, out); }; });

  auto* stab = app.add_subcommand("stabilizer", "setwise stabilizer of B_l");
  add_family(stab, a);
  add_common(stab, a);
  add_group(stab, a);
  stab->callback([&] { run = [&] { return cmd_stabilizer(a, out); }; });

  auto* orb = app.add_subcommand("orbit", "orbit of B_l under the affine group");
  add_family(orb, a);
  add_common(orb, a);
  add_group(orb, a);
  orb->add_flag("--blocks", a.blocks, "include every orbit block");
  orb->callback([&] { run = [&] { return cmd_orbit(a, out); }; });

  auto* homog = app.add_subcommand("homogeneity", "2-homogeneity of the affine group");
  add_family(homog, a, false);
  add_common(homog, a);
  homog->add_option("--group", a.group, "full or qr")->check(CLI::IsMember({"full", "qr"}));
  homog->callback([&] { run = [&] { return cmd_homogeneity(a, out); }; });

  auto* eq = app.add_subcommand("equality", "compare the translate families A1, A2, A3");
  add_family(eq, a);
  add_common(eq, a);
  eq->callback([&] { run = [&] { return cmd_equality(a, out); }; });

  auto* curve = app.add_subcommand("curve", "count points and certify bounds");
  add_family(curve, a);
  add_common(curve, a);
  curve->add_option("-a,--alpha", a.alpha, "alpha as a field index");
  curve->add_option("-b,--beta", a.beta, "beta as a field index");
  curve->callback([&] { run = [&] { return cmd_curve(a, out); }; });

  auto* sweep = app.add_subcommand("sweep", "run a TOML sweep config");
  sweep->add_option("config", a.config, "config path")->required();
  add_common(sweep, a);
  sweep->callback([&] { run = [&] { return cmd_sweep(a, out, err); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    return run();
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
  } catch (const EmptyStructureError& e) {
    err << "empty: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "invalid: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    err << "invalid: " << e.what() << "\n";
  } catch (const std::out_of_range& e) {
    err << "invalid: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kViolation;
  }
  return kUsage;
}

}  // namespace qdesign
