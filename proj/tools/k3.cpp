// Command-line front end: lattice queries, configuration audits, pencil
// surveys and certification of the explicit quartics.

#include "CLI11.hpp"
#include "k3/enumeration.hpp"
#include "k3/quartics.hpp"
#include "k3/version.hpp"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace k3;

namespace {

enum Exit { kOk = 0, kInternal = 1, kParse = 2, kInvariant = 3, kBudget = 4 };

struct parse_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct invariant_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct budget_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string verb;
  std::vector<std::string> inputs;
  std::size_t max_nodes = 0;
  double max_seconds = 0;
  unsigned threads = 1;
  bool no_timestamp = false;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_failure("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// FNV-1a, enough to tell inputs apart in reports
std::string digest(const std::string &data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

void provenance(std::ostream &out, const Options &o) {
  out << "# k3 " << o.verb << "\n";
  for (const auto &path : o.inputs) out << "# input " << path << " " << digest(read_file(path)) << "\n";
  out << "# modules";
  for (const auto &[name, version] : kModuleVersions) out << " " << name << "=" << version;
  out << "\n# budget max_nodes=" << o.max_nodes << " max_seconds=" << o.max_seconds << " threads=" << o.threads << "\n";
  if (!o.no_timestamp) {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    out << "# time " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << "\n";
  }
}

template <class F> auto parsing(F &&f) {
  try {
    return f();
  } catch (const std::invalid_argument &e) {
    throw parse_failure(e.what());
  } catch (const pencil_error &e) {
    throw parse_failure(e.what());
  }
}

PolarizedLattice load_lattice(const std::string &path) {
  std::istringstream in(read_file(path));
  return parsing([&] { return read_polarized_lattice(in); });
}

std::string signature_text(const IntMatrix &g) {
  const Signature s = signature(g);
  return "(" + std::to_string(s.pos) + "," + std::to_string(s.neg) + "," + std::to_string(s.zero) + ")";
}

int lattice_discr(const Options &o) {
  const PolarizedLattice s = load_lattice(o.inputs.at(0));
  std::cout << "rank " << s.rank() << "\ndet " << s.base.det() << "\nsignature " << signature_text(s.base.gram)
            << "\neven " << (s.base.is_even() ? "yes" : "no") << "\n";
  if (s.base.det() == 0) throw invariant_failure("degenerate lattice has no discriminant form");
  const DiscriminantForm d = discriminant_form(s.base);
  std::cout << "discriminant order " << d.order() << "\ndiscriminant " << d.to_string() << "\n";
  return kOk;
}

int lattice_embeds(const Options &o) {
  const PolarizedLattice s = load_lattice(o.inputs.at(0));
  if (s.base.det() == 0) throw invariant_failure("degenerate lattice");
  std::cout << "primitive embedding into the K3 lattice: " << (nikulin_embeds(s.base) ? "yes" : "no") << "\n";
  return kOk;
}

int config_validate(const Options &o) {
  const PolarizedLattice s = load_lattice(o.inputs.at(0));
  if (s.h.empty()) throw parse_failure("lattice file has no polarization");
  const ValidityReport r = validate_configuration(s);
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  std::cout << "even " << yn(r.even) << "\nnondegenerate " << yn(r.nondegenerate) << "\nhyperbolic " << yn(r.hyperbolic)
            << "\nspanned_by_lines " << yn(r.spanned_by_lines) << "\nno_roots_in_perp " << yn(r.no_roots_in_perp)
            << "\nno_elliptic_pencil " << yn(r.no_elliptic_pencil) << "\nlines " << r.line_count << "\n";
  for (const auto &f : r.failures) std::cout << "failure " << f << "\n";
  const bool pre = r.even && r.nondegenerate && r.hyperbolic && r.spanned_by_lines;
  std::cout << "verdict " << (!pre ? "not a pre-configuration" : r.ok() ? "configuration" : "pre-configuration, not a configuration")
            << "\n";
  return r.ok() ? kOk : kInvariant;
}

void report_configuration(const Configuration &c) {
  const auto &s = c.lattice();
  std::cout << "lines " << c.size() << "\nrank " << s.rank() << "\ndet " << s.base.det() << "\n";
  std::cout << "pencil structure " << format_structure(pencil_structure(c), true) << "\n";
  std::cout << "linking structure " << format_structure(linking_structure(c), false) << "\n";
  const auto planes = planes_of(c);
  std::size_t segre = 0;
  for (const auto &p : planes) segre += segre_count_check(c, p).ok();
  std::cout << "planes " << planes.size() << "\nsegre identity " << segre << "/" << planes.size() << "\n";
}

int config_structure(const Options &o) {
  std::istringstream in(read_file(o.inputs.at(0)));
  const Configuration c = parsing([&] { return read_configuration(in); });
  report_configuration(c);
  const auto bad = skew_lemma_audit(c);
  for (const auto &b : bad) std::cout << "violation " << b << "\n";
  std::cout << "audit " << (bad.empty() ? "clean" : "violations") << "\n";
  return bad.empty() ? kOk : kInvariant;
}

int pencil_types(bool search_inside) {
  std::cout << "p q bound searched realizable subgroups\n";
  for (const auto &v : admissible_pencil_types(search_inside))
    std::cout << v.p << " " << v.q << " " << (v.within_bound ? "inside" : "outside") << " " << (v.searched ? "yes" : "no")
              << " " << (v.realizable ? "accepted" : "rejected") << " " << v.subgroups << "\n";
  return kOk;
}

// Appends to the database file through a temporary file and a rename.
void append_atomically(const std::string &path, const std::string &block) {
  std::string existing;
  if (std::filesystem::exists(path)) existing = read_file(path);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw parse_failure("cannot write " + tmp);
    out << existing << block;
    if (!out.flush()) throw parse_failure("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

int pencil_survey(const Options &o, const std::string &db_path, bool triplets) {
  std::ostringstream block;
  bool complete = false;
  std::string stop;
  if (triplets) {
    const TripletSurvey s = run_triplet_survey({o.max_nodes, o.max_seconds, o.threads});
    std::size_t maximal = 0, extremal = 0, best = 0;
    for (const auto &r : s.records) {
      maximal += r.maximal;
      extremal += r.extremal;
      best = std::max(best, r.lines);
    }
    std::cout << "records " << s.records.size() << "\nmaximal " << maximal << "\nextremal " << extremal
              << "\nmax lines " << best << "\nnodes " << s.nodes << "\n";
    write_triplet_survey(block, s);
    complete = s.complete;
    stop = s.stop_reason;
  } else {
    if (o.inputs.empty()) throw parse_failure("pencil-survey needs a descriptor file or --triplets");
    std::istringstream in(read_file(o.inputs.at(0)));
    SurveyDescriptor d = parsing([&] { return read_survey_descriptor(in); });
    if (o.max_nodes) d.max_nodes = o.max_nodes;
    if (o.max_seconds > 0) d.max_seconds = o.max_seconds;
    d.threads = o.threads;
    const SurveyDatabase db = run_survey(d);
    std::size_t best = 0, mismatched = 0;
    for (const auto &r : db.records) {
      best = std::max(best, r.lines);
      mismatched += r.lines != r.recount;
    }
    std::cout << "records " << db.records.size() << "\nmax lines " << best << "\nnodes " << db.nodes << "\n";
    write_survey_database(block, db);
    if (mismatched) throw invariant_failure(std::to_string(mismatched) + " records fail the line recount");
    complete = db.complete;
    stop = db.stop_reason;
  }
  if (!db_path.empty()) append_atomically(db_path, block.str());
  std::cout << "complete " << (complete ? "yes" : "no") << "\n";
  if (!complete) throw budget_failure("survey stopped: " + stop);
  return kOk;
}

void export_lines(const std::string &path, const std::vector<ProjLine> &lines) {
  if (path.empty()) return;
  std::ostringstream s;
  for (const auto &l : lines) s << l.to_string() << "\n";
  std::ofstream out(path, std::ios::trunc);
  if (!out || !(out << s.str())) throw parse_failure("cannot write " + path);
}

void report_discriminant(const PolarizedLattice &s, const DiscriminantForm &expected, const std::string &name) {
  const DiscriminantForm d = discriminant_form(s.base);
  const bool iso = forms_isomorphic(d, expected).has_value();
  std::cout << "discr " << d.to_string() << (iso ? " = " : " != ") << name << "\n";
  if (!iso) throw invariant_failure("discriminant form is not " + name);
}

void expect(bool ok, const std::string &what) {
  if (!ok) throw invariant_failure(what);
}

int certify_schur(const std::string &lines_out) {
  const QuarticSurface x = schur_quartic();
  const SchurLines s = schur_construction();
  const FanoConfiguration f = fano_configuration(s.lines);
  std::cout << s.lines.size() << " lines; l0 orbit " << s.l0_orbit << "\n";
  report_configuration(f.config);
  report_discriminant(f.config.lattice(), form_direct_sum(form_v(2), form_cyclic(4, 3)), "V_4+<4/3>");
  expect(s.lines.size() == 64, "expected 64 lines");
  expect(format_structure(pencil_structure(f.config), true) == "(6,0)^16 (4,6)^48", "unexpected pencil structure");
  expect(skew_lemma_audit(f.config).empty(), "configuration fails the lemma audit");
  std::cout << "real lines";
  for (const auto &sigma : schur_real_structures()) std::cout << " " << real_line_count(s.lines, sigma);
  std::cout << "\n";
  const AutomorphismAudit a = automorphism_audit(x, schur_automorphism_generators(), s.lines);
  std::cout << "automorphisms " << a.order << (a.faithful ? " faithful" : " not faithful") << "\n";
  export_lines(lines_out, s.lines);
  return kOk;
}

int certify_y56(const std::string &lines_out) {
  const QuarticSurface y = y56_quartic();
  const Y56Lines c = y56_construction();
  const FanoConfiguration f = fano_configuration(c.lines);
  std::cout << c.lines.size() << " lines\n";
  report_configuration(f.config);
  report_discriminant(f.config.lattice(), form_direct_sum(form_cyclic(3, 2), form_cyclic(63, 32)), "<3/2>+<63/32>");
  const auto bad = y56_incidence_audit(c);
  for (const auto &b : bad) std::cout << "incidence " << b << "\n";
  std::cout << "incidences " << (bad.empty() ? "hold" : "fail") << "\n";
  const bool tr = totally_reflexive_test(f.config.lattice().base);
  std::cout << "totally reflexive " << (tr ? "yes" : "no") << "\ntranscendental";
  for (const auto &t : transcendental_candidates(f.config.lattice())) std::cout << " " << t.to_string();
  std::cout << "\nreal lines " << real_line_count(c.lines, standard_conjugation(y.field())) << "\n";
  const AutomorphismAudit a = automorphism_audit(y, y56_automorphism_generators(), c.lines);
  std::cout << "automorphisms " << a.order << (a.faithful ? " faithful" : " not faithful") << "\n";
  expect(c.lines.size() == 56 && bad.empty(), "line construction fails");
  expect(format_structure(pencil_structure(f.config), true) == "(4,4)^32 (3,7)^24", "unexpected pencil structure");
  export_lines(lines_out, c.lines);
  return kOk;
}

int certify_fermat(const std::string &lines_out) {
  const auto lines = fermat_lines();
  const FanoConfiguration f = fano_configuration(lines);
  std::cout << lines.size() << " lines\n";
  report_configuration(f.config);
  expect(lines.size() == 48, "expected 48 lines");
  export_lines(lines_out, lines);
  return kOk;
}

int trans_genus(const Options &o) {
  const PolarizedLattice s = load_lattice(o.inputs.at(0));
  const auto t = transcendental_candidates(s);
  std::cout << "candidates " << t.size() << "\n";
  for (const auto &f : t) std::cout << f.to_string() << " det " << f.det() << "\n";
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lattices, configurations and lines of quartic surfaces"};
  app.require_subcommand(1);
  Options o;
  std::string db_path, lines_out;
  bool triplets = false, search_inside = false;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--max-nodes", o.max_nodes, "Node budget for surveys (0: unlimited)");
    sub->add_option("--max-seconds", o.max_seconds, "Wall-clock budget in seconds (0: unlimited)");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    sub->add_flag("--no-timestamp", o.no_timestamp, "Omit the time line of the header");
  };
  auto with_input = [&](CLI::App *sub, const std::string &what) {
    sub->add_option("input", o.inputs, what)->required()->check(CLI::ExistingFile);
    common(sub);
  };
  with_input(app.add_subcommand("lattice-discr", "Determinant, signature and discriminant form"), "Lattice file");
  with_input(app.add_subcommand("lattice-embeds", "Primitive embedding test"), "Lattice file");
  with_input(app.add_subcommand("config-validate", "Configuration validity checks"), "Polarized lattice file");
  with_input(app.add_subcommand("config-structure", "Pencil and linking structures, lemma audit"), "Configuration file");
  auto *types = app.add_subcommand("pencil-types", "Admissible pencil types");
  types->add_flag("--search-inside", search_inside, "Also search every type inside the bound");
  common(types);
  auto *survey = app.add_subcommand("pencil-survey", "Section-adding survey");
  survey->add_option("input", o.inputs, "Survey descriptor")->check(CLI::ExistingFile);
  survey->add_flag("--triplets", triplets, "Run the triplet survey for (6,0) with pivot beta");
  survey->add_option("--db", db_path, "Database file to append the records to");
  common(survey);
  for (const char *name : {"certify-schur", "certify-y56", "certify-fermat"}) {
    auto *c = app.add_subcommand(name, "Construct and certify the lines of an explicit quartic");
    c->add_option("--lines-out", lines_out, "Write the lines, one per row");
    common(c);
  }
  with_input(app.add_subcommand("trans-genus", "Transcendental lattice candidates"), "Lattice file of rank 20");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }
  o.verb = app.get_subcommands().front()->get_name();

  try {
    provenance(std::cout, o);
    const std::string &v = o.verb;
    if (v == "lattice-discr") return lattice_discr(o);
    if (v == "lattice-embeds") return lattice_embeds(o);
    if (v == "config-validate") return config_validate(o);
    if (v == "config-structure") return config_structure(o);
    if (v == "pencil-types") return pencil_types(search_inside);
    if (v == "pencil-survey") return pencil_survey(o, db_path, triplets);
    if (v == "certify-schur") return certify_schur(lines_out);
    if (v == "certify-y56") return certify_y56(lines_out);
    if (v == "certify-fermat") return certify_fermat(lines_out);
    if (v == "trans-genus") return trans_genus(o);
    return kInternal;
  } catch (const parse_failure &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const budget_failure &e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  } catch (const invariant_failure &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const quartic_error &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const config_error &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const lattice_error &e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
