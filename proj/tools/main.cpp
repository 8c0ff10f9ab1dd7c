#include <filesystem>
#include <functional>
#include <map>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "invlayers/combinat.hpp"
#include "invlayers/cyclic_translation.hpp"
#include "invlayers/errors.hpp"
#include "invlayers/graph.hpp"
#include "invlayers/invariant_ring.hpp"
#include "invlayers/permgroup.hpp"
#include "invlayers/tensor_basis.hpp"
#include "invlayers/typed_layers.hpp"
#include "invlayers/zero_sum.hpp"
#include "selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace invlayers;

namespace {

constexpr const char* kToolName = "invlayers";
constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kValidation = 1, kBudget = 2, kCounterexample = 3 };

struct Common {
  bool selftest = false;
  std::uint64_t seed = 1;
  std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c, std::vector<std::string> formats) {
  c.format = formats.front();
  cmd->add_flag("--selftest", c.selftest, "Run this subcommand's property suite at reduced scale");
  cmd->add_option("--seed", c.seed, "Seed for randomized checks")->capture_default_str();
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember(formats))
      ->capture_default_str();
}

json report_header(const std::string& subcommand, json config) {
  return {{"tool", kToolName}, {"version", kVersion}, {"subcommand", subcommand},
          {"config", std::move(config)}};
}

std::ifstream open_input(const std::string& path, const std::string& option) {
  if (!fs::is_regular_file(path)) {
    throw ValidationError(option + ": cannot read '" + path + "'");
  }
  std::ifstream in(path);
  if (!in) throw ValidationError(option + ": cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, const std::string& option) {
  const fs::path p(path);
  if (p.has_parent_path() && !fs::is_directory(p.parent_path())) {
    throw ValidationError(option + ": directory of '" + path + "' does not exist");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(option + ": cannot write '" + path + "'");
  return out;
}

json bigint_json(const combinat::BigInt& v) { return v.str(); }

// --- dims -------------------------------------------------------------------

struct DimsArgs {
  Common common;
  int m = 1;
  int k = 0;
  int d = 0;
  std::vector<int> sizes;
  bool oracle = false;
};

int run_dims(const DimsArgs& a) {
  const auto budgets = perm::Budgets::from_env();
  if (a.m < 1) throw ValidationError("--m must be >= 1");
  if (a.k < 0 || a.d < 0) throw ValidationError("--k and --d must be >= 0");
  const int order = a.k + a.d;
  json config = {{"m", a.m}, {"k", a.k}, {"d", a.d}, {"sizes", a.sizes}, {"oracle", a.oracle},
                 {"tuple_budget", budgets.tuple_budget}};
  json report = report_header("dims", config);
  const auto formula = combinat::gen_bell(a.m, order);
  report["order"] = order;
  report["gen_bell"] = bigint_json(formula);
  std::ostringstream text;
  text << "gen_bell(m=" << a.m << ", k=" << order << ") = " << formula << '\n';
  if (a.oracle) {
    if (a.sizes.empty()) throw ValidationError("--oracle requires --sizes");
    if (static_cast<int>(a.sizes.size()) != a.m) {
      throw ValidationError("--sizes has " + std::to_string(a.sizes.size()) +
                            " entries but --m is " + std::to_string(a.m));
    }
    const perm::TypedNodeSet nodes(a.sizes);
    const auto group = perm::young_generators(nodes);
    const auto orbits = perm::orbit_count_on_tuples(group, order, budgets.tuple_budget);
    const auto burnside = perm::burnside_count(group, order, budgets.closure_cap);
    const auto basis = basis::build_full_basis(order, nodes, budgets.tuple_budget);
    report["oracle"] = {{"orbit_count", orbits},
                        {"burnside", bigint_json(burnside)},
                        {"basis_elements", basis.elements.size()},
                        {"nonempty_basis_elements", basis.nonempty_count()}};
    text << "formula " << formula << ", oracle " << orbits << " (burnside " << burnside
         << ", nonempty basis " << basis.nonempty_count() << " of " << basis.elements.size()
         << ")\n";
  }
  if (a.common.format == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << text.str();
  }
  return kOk;
}

// --- basis ------------------------------------------------------------------

struct BasisArgs {
  Common common;
  int k = 0;
  std::vector<int> sizes;
  std::string out;
};

int run_basis(const BasisArgs& a) {
  const auto budgets = perm::Budgets::from_env();
  if (a.k < 0) throw ValidationError("--k must be >= 0");
  const perm::TypedNodeSet nodes(a.sizes);
  auto out = open_output(a.out, "--out");
  const auto b = basis::build_full_basis(a.k, nodes, budgets.tuple_budget);
  basis::serialize_basis(out, b);
  if (!out) throw ValidationError("--out: write to '" + a.out + "' failed");
  if (a.common.format == "json") {
    json report = report_header("basis", {{"k", a.k}, {"sizes", a.sizes}, {"out", a.out},
                                          {"tuple_budget", budgets.tuple_budget}});
    report["records"] = b.elements.size();
    report["nonempty"] = b.nonempty_count();
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << b.elements.size() << " records (" << b.nonempty_count() << " nonempty) written to "
              << a.out << '\n';
  }
  return kOk;
}

// --- layer-apply --------------------------------------------------------------

struct LayerArgs {
  Common common;
  std::string weights;
  std::string input;
};

int run_layer_apply(const LayerArgs& a) {
  auto win = open_input(a.weights, "--weights");
  const auto map = layers::load_equivariant_map(win);
  auto xin = open_input(a.input, "--input");
  json data;
  try {
    data = json::parse(xin);
  } catch (const json::parse_error& e) {
    throw ValidationError("--input: " + std::string(e.what()));
  }
  if (data.is_object() && data.contains("x")) data = data["x"];
  if (!data.is_array()) throw ValidationError("--input must be a JSON array of numbers");
  const int n = map.nodes().n();
  if (static_cast<int>(data.size()) != n) {
    throw ValidationError("--input has " + std::to_string(data.size()) +
                          " entries but the layer acts on " + std::to_string(n) + " nodes");
  }
  layers::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    if (!data[i].is_number()) {
      throw ValidationError("--input entry " + std::to_string(i + 1) + " is not a number");
    }
    x[i] = data[i].get<double>();
  }
  const auto y = map.forward(x);
  json out = json::array();
  for (int i = 0; i < n; ++i) out.push_back(y[i]);
  if (a.common.format == "json") {
    json report = report_header("layer-apply", {{"weights", a.weights}, {"input", a.input}});
    report["type_sizes"] = map.nodes().sizes();
    report["output"] = out;
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << out.dump() << '\n';
  }
  return kOk;
}

// --- cyclic-dims --------------------------------------------------------------

struct CyclicArgs {
  Common common;
  int n = 0;
  int d = 0;
  int k = 1;
  bool oracle = false;
};

int run_cyclic_dims(const CyclicArgs& a) {
  const auto budgets = perm::Budgets::from_env();
  if (a.n < 1 && a.d < 1) throw ValidationError("give --n (cyclic) and/or --d (translation)");
  if (a.k < 1) throw ValidationError("--k must be >= 1");
  json report = report_header("cyclic-dims", {{"n", a.n}, {"d", a.d}, {"k", a.k},
                                              {"oracle", a.oracle},
                                              {"tuple_budget", budgets.tuple_budget}});
  std::ostringstream text;
  if (a.n >= 1) {
    const auto formula = cyclic::cyclic_invariant_dim(a.n, a.k);
    json entry = {{"formula", bigint_json(formula)}};
    text << "cyclic C_" << a.n << ", k=" << a.k << ": n^(k-1) = " << formula;
    if (a.oracle) {
      const auto group = perm::cyclic_generators(a.n);
      const auto orbits = perm::orbit_count_on_tuples(group, a.k, budgets.tuple_budget);
      entry["orbit_count"] = orbits;
      entry["burnside"] = bigint_json(perm::burnside_count(group, a.k, budgets.closure_cap));
      text << ", oracle " << orbits;
    }
    text << '\n';
    report["cyclic"] = entry;
  }
  if (a.d >= 1) {
    const auto formula = cyclic::translation_invariant_dim(a.d, a.k);
    json entry = {{"formula", bigint_json(formula)}};
    text << "translations C_" << a.d << " x C_" << a.d << ", k=" << a.k
         << ": d^(2k-2) = " << formula;
    if (a.oracle) {
      const auto group = perm::translation_generators(a.d);
      const auto orbits = perm::orbit_count_on_tuples(group, a.k, budgets.tuple_budget);
      entry["orbit_count"] = orbits;
      entry["burnside"] = bigint_json(perm::burnside_count(group, a.k, budgets.closure_cap));
      text << ", oracle " << orbits;
    }
    text << '\n';
    report["translation"] = entry;
  }
  if (a.common.format == "json") {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << text.str();
  }
  return kOk;
}

// --- dft ----------------------------------------------------------------------

struct DftArgs {
  Common common;
  std::string input;
  std::string out;
  int d = 0;
  int trials = 50;
  bool check_diag = false;
};

int run_dft(const DftArgs& a) {
  if (a.input.empty() && !a.check_diag) {
    throw ValidationError("give --input to transform an image and/or --check-diag");
  }
  json report = report_header("dft", {{"input", a.input}, {"out", a.out}, {"d", a.d},
                                      {"trials", a.trials}, {"check_diag", a.check_diag},
                                      {"seed", a.common.seed}});
  int d = a.d;
  if (!a.input.empty()) {
    auto in = open_input(a.input, "--input");
    const auto image = cyclic::read_grid(in);
    if (d != 0 && d != image.d()) {
      throw ValidationError("--d is " + std::to_string(d) + " but --input is " +
                            std::to_string(image.d()) + "x" + std::to_string(image.d()));
    }
    d = image.d();
    const auto z = cyclic::dft2(image);
    if (!a.out.empty()) {
      auto out = open_output(a.out, "--out");
      cyclic::write_spectral_json(out, z);
    } else if (!a.check_diag) {
      cyclic::write_spectral_json(std::cout, z);
      return kOk;
    }
  }
  if (a.check_diag) {
    if (d < 1) throw ValidationError("--check-diag needs --d or --input");
    if (a.trials < 1) throw ValidationError("--trials must be >= 1");
    const double diag = cyclic::verify_diagonalization(d, a.trials, a.common.seed);
    const double trip = cyclic::round_trip_error(d, a.trials, a.common.seed);
    report["max_diagonalization_deviation"] = diag;
    report["max_round_trip_error"] = trip;
    if (a.common.format == "json") {
      std::cout << report.dump(2) << '\n';
    } else {
      std::cout << "d=" << d << ": diagonalization deviation " << diag << ", round trip " << trip
                << '\n';
    }
  }
  return kOk;
}

// --- davenport / decompose --------------------------------------------------

struct DavenportArgs {
  Common common;
  int d = 0;
  std::uint64_t budget = zerosum::kDefaultDavenportBudget;
};

int run_davenport(const DavenportArgs& a) {
  if (a.d < 1) throw ValidationError("--d must be >= 1");
  if (a.d > zerosum::kDavenportMaxD) {
    throw BudgetError("--d " + std::to_string(a.d) + " exceeds the exhaustive search limit " +
                      std::to_string(zerosum::kDavenportMaxD));
  }
  const auto cert = zerosum::max_generator_degree_translation(a.d, a.budget);
  const auto& r = *cert.davenport;
  if (!r.certified) {
    throw BudgetError("search for d=" + std::to_string(a.d) + " exhausted node budget " +
                      std::to_string(a.budget) + " after length " +
                      std::to_string(r.checked_up_to_length));
  }
  if (a.common.format == "json") {
    json report = report_header("davenport", {{"d", a.d}, {"node_budget", a.budget}});
    report["davenport_constant"] = r.constant;
    report["max_zero_sum_free_length"] = r.max_zero_sum_free_length;
    report["witness"] = zerosum::to_json(r.witness);
    report["nodes"] = r.nodes;
    report["max_generator_degree"] = cert.degree;
    report["indecomposable_of_max_degree"] = zerosum::to_json(cert.indecomposable);
    report["fully_certified"] = cert.fully_certified();
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << "D=" << r.constant << ", zero-sum-free witness length "
              << r.max_zero_sum_free_length << '\n'
              << "witness " << zerosum::to_json(r.witness).dump() << '\n';
  }
  return kOk;
}

struct DecomposeArgs {
  Common common;
  int d = 0;
  std::string monomial;
};

int run_decompose(const DecomposeArgs& a) {
  if (a.d < 1) throw ValidationError("--d must be >= 1");
  auto in = open_input(a.monomial, "--monomial");
  json data;
  try {
    data = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("--monomial: " + std::string(e.what()));
  }
  const auto seq = zerosum::sequence_from_json(a.d, data);
  if (!zerosum::is_zero_sum(seq)) {
    throw ValidationError("--monomial is not translation invariant: its sum is nonzero");
  }
  const auto factors = zerosum::decompose_invariant_monomial(seq);
  json fj = json::array();
  for (const auto& f : factors) fj.push_back(zerosum::to_json(f));
  if (a.common.format == "json") {
    json report = report_header("decompose", {{"d", a.d}, {"monomial", a.monomial}});
    report["degree"] = seq.degree();
    report["factors"] = fj;
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << factors.size() << " factors of degree <= " << 2 * a.d - 1 << '\n';
    for (const auto& f : fj) std::cout << f.dump() << '\n';
  }
  return kOk;
}

// --- conjectures --------------------------------------------------------------

struct ConjArgs {
  Common common;
  int nmax = 0;
  std::string in;
  std::string cap = "2n";
  int jobs = 1;
  std::string out;
  std::string summary;
  std::string json_dir;
  std::string arith = "modular";
  std::uint64_t budget = invring::kDefaultMonomialBudget;
};

std::vector<graph::Graph> read_graph6_file(const std::string& path) {
  auto in = open_input(path, "--in");
  std::vector<graph::Graph> graphs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      graphs.push_back(graph::parse_graph6(line));
    } catch (const ParseError& e) {
      throw ParseError("--in line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
  }
  return graphs;
}

int run_conjectures(const ConjArgs& a) {
  if ((a.nmax > 0) == !a.in.empty()) throw ValidationError("give exactly one of --nmax or --in");
  if (a.jobs < 1) throw ValidationError("--jobs must be >= 1");
  const auto policy = invring::CapPolicy::parse(a.cap);
  invring::GeneratorOptions options;
  options.arithmetic =
      a.arith == "exact" ? invring::Arithmetic::kExact : invring::Arithmetic::kModular;
  options.monomial_budget = a.budget;
  if (!a.json_dir.empty() && !fs::is_directory(a.json_dir)) {
    throw ValidationError("--json-dir: '" + a.json_dir + "' is not a directory");
  }
  std::ofstream csv_file;
  std::ofstream summary_file;
  if (!a.out.empty()) csv_file = open_output(a.out, "--out");
  if (!a.summary.empty()) summary_file = open_output(a.summary, "--summary");

  invring::SweepResult result;
  if (a.nmax > 0) {
    result = invring::sweep(a.nmax, policy, a.jobs, options);
  } else {
    result = invring::sweep_graphs(read_graph6_file(a.in), policy, a.jobs, options);
  }

  json config = {{"nmax", a.nmax}, {"in", a.in}, {"cap", policy.describe()}, {"jobs", a.jobs},
                 {"arith", a.arith}, {"monomial_budget", a.budget}};
  if (!a.json_dir.empty()) {
    for (const auto& r : result.reports) {
      json report = report_header("conjectures", config);
      report["result"] = invring::to_json(r);
      // graph6 may contain '/' and other awkward characters; hex-encode.
      std::ostringstream name;
      name << "n" << r.n << "_";
      for (unsigned char c : r.graph6) name << std::hex << static_cast<int>(c);
      auto out = open_output((fs::path(a.json_dir) / (name.str() + ".json")).string(),
                             "--json-dir");
      out << report.dump(2) << '\n';
    }
  }
  std::ostream& csv = a.out.empty() ? std::cout : csv_file;
  if (a.common.format == "json") {
    json report = report_header("conjectures", config);
    json rows = json::array();
    for (const auto& r : result.reports) rows.push_back(invring::to_json(r));
    report["results"] = rows;
    csv << report.dump(2) << '\n';
  } else {
    csv << "# " << kToolName << ' ' << kVersion << " conjectures " << config.dump() << '\n';
    invring::write_reports_csv(csv, result.reports);
  }
  if (!a.summary.empty()) invring::write_summary_csv(summary_file, result.summary);
  if (!a.out.empty() || a.common.format == "json") {
    invring::write_summary_csv(std::cerr, result.summary);
  }
  if (result.any_counterexample()) {
    std::cerr << "counterexample found\n";
    return kCounterexample;
  }
  return kOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant and equivariant tensor layers: dimensions, bases, checks"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> text_json{"text", "json"};

  DimsArgs dims;
  auto* c_dims = app.add_subcommand("dims", "Generalized Bell dimensions with optional orbit oracle");
  c_dims->add_option("--m", dims.m, "Number of node types");
  c_dims->add_option("--k", dims.k, "Input tensor order");
  c_dims->add_option("--d", dims.d, "Output tensor order (0 for invariant layers)");
  c_dims->add_option("--sizes", dims.sizes, "Nodes per type, comma separated")->delimiter(',');
  c_dims->add_flag("--oracle", dims.oracle, "Cross-check by orbit counting on explicit sizes");
  add_common(c_dims, dims.common, text_json);

  BasisArgs basis_args;
  auto* c_basis = app.add_subcommand("basis", "Write the indicator basis of invariant k-tensors");
  c_basis->add_option("--k", basis_args.k, "Tensor order");
  c_basis->add_option("--sizes", basis_args.sizes, "Nodes per type, comma separated")
      ->delimiter(',');
  c_basis->add_option("--out", basis_args.out, "Output basis file (JSON Lines)");
  add_common(c_basis, basis_args.common, text_json);

  LayerArgs layer;
  auto* c_layer = app.add_subcommand("layer-apply", "Apply an equivariant layer to a node signal");
  c_layer->add_option("--weights", layer.weights, "Layer weights JSON");
  c_layer->add_option("--input", layer.input, "Input vector JSON");
  add_common(c_layer, layer.common, text_json);

  CyclicArgs cyc;
  auto* c_cyc = app.add_subcommand("cyclic-dims", "Invariant dimensions for cyclic and 2D translation groups");
  c_cyc->add_option("--n", cyc.n, "Cycle length");
  c_cyc->add_option("--d", cyc.d, "Grid side for translations");
  c_cyc->add_option("--k", cyc.k, "Tensor order")->capture_default_str();
  c_cyc->add_flag("--oracle", cyc.oracle, "Cross-check by orbit counting");
  add_common(c_cyc, cyc.common, text_json);

  DftArgs dft;
  auto* c_dft = app.add_subcommand("dft", "2D discrete Fourier transform of a d x d image");
  c_dft->add_option("--input", dft.input, "Image file (CSV or JSON)");
  c_dft->add_option("--out", dft.out, "Spectral output JSON");
  c_dft->add_option("--d", dft.d, "Grid side for --check-diag without --input");
  c_dft->add_option("--trials", dft.trials, "Random images for --check-diag")->capture_default_str();
  c_dft->add_flag("--check-diag", dft.check_diag, "Check that translations act diagonally");
  add_common(c_dft, dft.common, text_json);

  DavenportArgs dav;
  auto* c_dav = app.add_subcommand("davenport", "Exhaustive Davenport constant of C_d x C_d");
  c_dav->add_option("--d", dav.d, "Cyclic factor order");
  c_dav->add_option("--budget", dav.budget, "Search node budget")->capture_default_str();
  add_common(c_dav, dav.common, text_json);

  DecomposeArgs dec;
  auto* c_dec = app.add_subcommand("decompose", "Factor an invariant monomial into short invariants");
  c_dec->add_option("--d", dec.d, "Grid side");
  c_dec->add_option("--monomial", dec.monomial, "JSON list of [a, b] exponent indices");
  add_common(c_dec, dec.common, text_json);

  ConjArgs conj;
  auto* c_conj = app.add_subcommand("conjectures", "Check the tensor-size bounds on small graphs");
  c_conj->add_option("--nmax", conj.nmax, "Enumerate all graphs with 1..nmax vertices");
  c_conj->add_option("--in", conj.in, "graph6 file, one graph per line");
  c_conj->add_option("--cap", conj.cap, "Degree cap: full, 2n, or an integer")->capture_default_str();
  c_conj->add_option("--jobs", conj.jobs, "Worker threads")->capture_default_str();
  c_conj->add_option("--out", conj.out, "CSV output (default stdout)");
  c_conj->add_option("--summary", conj.summary, "Per-n summary CSV");
  c_conj->add_option("--json-dir", conj.json_dir, "Directory for per-graph JSON reports");
  c_conj->add_option("--arith", conj.arith, "Rank arithmetic")
      ->check(CLI::IsMember({"modular", "exact"}))
      ->capture_default_str();
  c_conj->add_option("--budget", conj.budget, "Monomial budget per degree")->capture_default_str();
  add_common(c_conj, conj.common, {"csv", "json"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  struct Entry {
    CLI::App* cmd;
    Common* common;
    std::function<int()> run;
  };
  const std::vector<Entry> entries{
      {c_dims, &dims.common, [&] { return run_dims(dims); }},
      {c_basis, &basis_args.common, [&] { return run_basis(basis_args); }},
      {c_layer, &layer.common, [&] { return run_layer_apply(layer); }},
      {c_cyc, &cyc.common, [&] { return run_cyclic_dims(cyc); }},
      {c_dft, &dft.common, [&] { return run_dft(dft); }},
      {c_dav, &dav.common, [&] { return run_davenport(dav); }},
      {c_dec, &dec.common, [&] { return run_decompose(dec); }},
      {c_conj, &conj.common, [&] { return run_conjectures(conj); }},
  };
  const std::map<std::string, std::vector<std::string>> required{
      {"dims", {"--m", "--k"}},
      {"basis", {"--k", "--sizes", "--out"}},
      {"layer-apply", {"--weights", "--input"}},
      {"davenport", {"--d"}},
      {"decompose", {"--d", "--monomial"}},
  };
  for (const auto& e : entries) {
    if (!e.cmd->parsed()) continue;
    const std::string name = e.cmd->get_name();
    if (e.common->selftest) {
      return tool::run_selftest(name, e.common->seed, std::cout) ? kOk : kValidation;
    }
    if (auto it = required.find(name); it != required.end()) {
      for (const auto& opt : it->second) {
        if (e.cmd->count(opt) == 0) {
          std::cerr << "error: " << name << " requires " << opt << '\n';
          return kValidation;
        }
      }
    }
    return guarded(e.run);
  }
  return kValidation;
}
