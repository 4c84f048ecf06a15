#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsem/compose.hpp"
#include "qsem/corpus.hpp"
#include "qsem/density.hpp"
#include "qsem/errors.hpp"
#include "qsem/harmonics.hpp"
#include "qsem/qlm.hpp"
#include "qsem/retrieval.hpp"
#include "qsem/textio.hpp"

namespace qsem::cli {

namespace {

// Thrown for bad flag combinations discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return kExitUsage;
    case ErrorKind::kNumeric:
      return kExitNumeric;
    default:
      return kExitData;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

compose::BindMode parse_mode(const std::string& mode) {
  if (mode == "conv") return compose::BindMode::kCircularConvolution;
  if (mode == "phase") return compose::BindMode::kPhaseAddition;
  throw UsageError("--mode must be conv or phase");
}

template <Field F>
std::map<std::string, Vector<F>> vector_map(const std::string& path) {
  auto in = open_input(path);
  std::map<std::string, Vector<F>> out;
  for (auto& nv : textio::read_vectors<F>(in)) {
    if (!out.emplace(nv.name, std::move(nv.coords)).second) {
      throw ParseError("vectors file '" + path + "': duplicate name '" + nv.name + "'");
    }
  }
  return out;
}

template <Field F>
const Vector<F>& lookup(const std::map<std::string, Vector<F>>& vs, const std::string& name) {
  const auto it = vs.find(name);
  if (it == vs.end()) throw UnknownTermError(name);
  return it->second;
}

template <Field F>
void write_tensor(std::ostream& out, const compose::Order2Tensor<F>& t) {
  for (Eigen::Index i = 0; i < t.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.entries.cols(); ++j) {
      if (j > 0) out << '\t';
      out << textio::format_scalar<F>(t.entries(i, j));
    }
    out << '\n';
  }
}

std::vector<std::vector<qlm::WeightedTerm>> phrases_from(const std::optional<std::string>& path) {
  if (!path) return {};
  auto in = open_input(*path);
  return qlm::read_phrases(in);
}

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "WARNING: " << w << '\n';
}

}  // namespace

Config parse_config(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  Config c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "weighting") {
        c.weighting = value.get<std::string>();
        corpus::parse_weighting(c.weighting);
      } else if (key == "min_df") {
        c.min_df = value.get<std::uint64_t>();
        if (c.min_df < 1) throw InvalidArgument("config: min_df must be >= 1");
      } else if (key == "tolerance") {
        c.tolerance = value.get<double>();
        if (!(c.tolerance > 0.0 && c.tolerance < 1.0)) {
          throw InvalidArgument("config: tolerance must lie in (0, 1)");
        }
      } else if (key == "smoothing") {
        c.smoothing = value.get<double>();
        if (!(c.smoothing >= 0.0 && c.smoothing <= 1.0)) {
          throw InvalidArgument("config: smoothing must lie in [0, 1]");
        }
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "top_k") {
        c.top_k = value.get<std::uint64_t>();
        if (c.top_k < 1) throw InvalidArgument("config: top_k must be >= 1");
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qsem: quantum-inspired semantic vector workbench", "qsem"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  // index build / index lsa
  auto* index = app.add_subcommand("index", "Term-document index tools");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Build an index from a corpus");
  std::string corpus_path, corpus_format, index_out;
  std::optional<std::string> weighting;
  std::optional<std::uint64_t> min_df;
  index_build->add_option("--corpus", corpus_path, "Corpus directory or TSV file")->required();
  index_build->add_option("--format", corpus_format, "dir | tsv")
      ->required()
      ->check(CLI::IsMember({"dir", "tsv"}));
  index_build->add_option("--weighting", weighting, "count | tfidf")
      ->check(CLI::IsMember({"count", "tfidf"}));
  index_build->add_option("--min-df", min_df, "Minimum document frequency")
      ->check(CLI::PositiveNumber);
  index_build->add_option("--out", index_out, "Output index file")->required();

  auto* index_lsa = index->add_subcommand("lsa", "Singular values of a rank-k reduction");
  std::string lsa_index;
  std::size_t lsa_k = 0;
  index_lsa->add_option("--index", lsa_index)->required();
  index_lsa->add_option("--k", lsa_k)->required();

  // search
  auto* search = app.add_subcommand("search", "Cosine search with orthogonal negation");
  std::string search_index;
  std::optional<std::string> query_text, queries_path;
  std::optional<std::uint64_t> top_k;
  std::string run_id = "q1";
  search->add_option("--index", search_index)->required();
  auto* q_opt = search->add_option("--query", query_text, "\"terms [NOT terms]\"");
  auto* qs_opt = search->add_option("--queries", queries_path, "query_id<TAB>query lines");
  q_opt->excludes(qs_opt);
  search->add_option("--top-k", top_k)->check(CLI::PositiveNumber);
  search->add_option("--run-id", run_id, "Query id written in the run column");

  // eval map
  auto* eval = app.add_subcommand("eval", "Evaluation");
  eval->require_subcommand(1);
  auto* eval_map = eval->add_subcommand("map", "Mean average precision of a run");
  std::string run_path, qrels_path;
  eval_map->add_option("--run", run_path)->required();
  eval_map->add_option("--qrels", qrels_path)->required();

  // qlm train / qlm rank
  auto* qlm_cmd = app.add_subcommand("qlm", "Quantum language model");
  qlm_cmd->require_subcommand(1);
  auto* qlm_train = qlm_cmd->add_subcommand("train", "Estimate a density for a document or query");
  std::string train_index, model_out;
  std::optional<std::string> train_doc, train_query, phrases_path;
  std::size_t max_iters = 1000;
  std::optional<double> qlm_tol;
  qlm_train->add_option("--index", train_index)->required();
  auto* doc_opt = qlm_train->add_option("--doc", train_doc, "Document id");
  auto* tq_opt = qlm_train->add_option("--query", train_query, "Query text");
  doc_opt->excludes(tq_opt);
  qlm_train->add_option("--phrases", phrases_path);
  qlm_train->add_option("--max-iters", max_iters)->check(CLI::PositiveNumber);
  qlm_train->add_option("--tol", qlm_tol)->check(CLI::PositiveNumber);
  qlm_train->add_option("--out", model_out)->required();

  auto* qlm_rank = qlm_cmd->add_subcommand("rank", "Rank document models by divergence");
  std::string query_model;
  std::vector<std::string> doc_models;
  std::optional<double> smoothing;
  qlm_rank->add_option("--query-model", query_model)->required();
  qlm_rank->add_option("--doc-models", doc_models)->required();
  qlm_rank->add_option("--smoothing", smoothing)->check(CLI::Range(0.0, 1.0));

  // hyponymy
  auto* hypo = app.add_subcommand("hyponymy", "Graded hyponymy between word densities");
  std::string densities_path, hypo_a, hypo_b;
  hypo->add_option("--densities", densities_path, "name<TAB>c1,c2,... context lines")
      ->required();
  hypo->add_option("--a", hypo_a)->required();
  hypo->add_option("--b", hypo_b)->required();

  // compose verb / sentence
  auto* comp = app.add_subcommand("compose", "Tensor composition");
  comp->require_subcommand(1);
  std::string triples_path, vectors_path, verb_name, subj_name, obj_name;
  auto* comp_verb = comp->add_subcommand("verb", "Verb tensor from subject/object pairs");
  comp_verb->add_option("--triples", triples_path)->required();
  comp_verb->add_option("--vectors", vectors_path)->required();
  comp_verb->add_option("--verb", verb_name)->required();
  auto* comp_sent = comp->add_subcommand("sentence", "Subject-verb-object sentence tensor");
  comp_sent->add_option("--triples", triples_path)->required();
  comp_sent->add_option("--vectors", vectors_path)->required();
  comp_sent->add_option("--subj", subj_name)->required();
  comp_sent->add_option("--verb", verb_name)->required();
  comp_sent->add_option("--obj", obj_name)->required();

  // bind / unbind
  std::string mode_name, bind_a, bind_b, bind_c, out_name;
  bool cleanup = false;
  auto* bind_cmd = app.add_subcommand("bind", "Bind two vectors");
  bind_cmd->add_option("--vectors", vectors_path)->required();
  bind_cmd->add_option("--mode", mode_name, "conv | phase")->required();
  bind_cmd->add_option("--a", bind_a)->required();
  bind_cmd->add_option("--b", bind_b)->required();
  bind_cmd->add_option("--name", out_name, "Name for the output vector");
  auto* unbind_cmd = app.add_subcommand("unbind", "Unbind a vector with a key");
  unbind_cmd->add_option("--vectors", vectors_path)->required();
  unbind_cmd->add_option("--mode", mode_name, "conv | phase")->required();
  unbind_cmd->add_option("--c", bind_c, "Bound vector")->required();
  unbind_cmd->add_option("--a", bind_a, "Key vector")->required();
  unbind_cmd->add_option("--name", out_name, "Name for the output vector");
  unbind_cmd->add_flag("--cleanup", cleanup, "Report the nearest stored vector");

  // psi
  auto* psi = app.add_subcommand("psi", "Relation encoding and retrieval from a facts file");
  std::string facts_path, psi_concept, psi_relation;
  std::size_t psi_dim = 1024;
  std::string psi_mode = "phase";
  std::optional<std::uint64_t> seed;
  psi->add_option("--facts", facts_path)->required();
  psi->add_option("--concept", psi_concept)->required();
  psi->add_option("--relation", psi_relation)->required();
  psi->add_option("--dim", psi_dim)->check(CLI::PositiveNumber);
  psi->add_option("--mode", psi_mode, "conv | phase");
  psi->add_option("--seed", seed);

  // fourier
  auto* fourier = app.add_subcommand("fourier", "Fourier coefficients and partial sums");
  std::string wave = "square", fourier_out = "csv";
  int wave_k = 1;
  double wave_c = 1.0;
  std::size_t num_harmonics = 4, samples = 201, quad_points = harmonics::kDefaultQuadPoints;
  fourier->add_option("--wave", wave, "square | sine | cosine | constant")
      ->check(CLI::IsMember({"square", "sine", "cosine", "constant"}));
  fourier->add_option("--k", wave_k, "Frequency for sine/cosine");
  fourier->add_option("--c", wave_c, "Value for constant");
  fourier->add_option("--harmonics", num_harmonics)->check(CLI::PositiveNumber);
  fourier->add_option("--samples", samples)->check(CLI::Range(2, 1000000));
  fourier->add_option("--quad-points", quad_points)->check(CLI::Range(64, 1 << 24));
  fourier->add_option("--out", fourier_out, "Output format")->check(CLI::IsMember({"csv"}));

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ERROR " << kExitUsage << ": " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Config cfg;
    if (config_path) cfg = parse_config(textio::read_file(*config_path));

    if (index_build->parsed()) {
      const auto fmt = corpus_format == "dir" ? corpus::SourceFormat::kDirOfTextFiles
                                              : corpus::SourceFormat::kTabSeparatedLines;
      const auto c = corpus::ingest(corpus_path, fmt);
      const auto ix = corpus::build_index(
          c, corpus::parse_weighting(weighting.value_or(cfg.weighting)),
          static_cast<std::size_t>(min_df.value_or(cfg.min_df)));
      corpus::save_index(ix, index_out);
      err << "indexed " << ix.num_docs() << " documents, " << ix.num_terms() << " terms\n";
    } else if (index_lsa->parsed()) {
      const auto ix = corpus::load_index(lsa_index);
      const auto red = corpus::lsa_reduce(ix, lsa_k);
      for (Eigen::Index k = 0; k < red.singular_values.size(); ++k) {
        out << (k + 1) << '\t' << textio::format_real(red.singular_values(k)) << '\n';
      }
    } else if (search->parsed()) {
      const auto ix = corpus::load_index(search_index);
      const auto k = static_cast<std::size_t>(top_k.value_or(cfg.top_k));
      std::vector<std::pair<std::string, std::string>> queries;
      if (query_text) {
        queries.emplace_back(run_id, *query_text);
      } else if (queries_path) {
        auto in = open_input(*queries_path);
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (textio::trim(line).empty()) continue;
          const auto tab = line.find('\t');
          if (tab == std::string::npos) throw ParseError("queries file: missing TAB");
          queries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
      } else {
        throw UsageError("search needs --query or --queries");
      }
      for (const auto& [qid, text] : queries) {
        const auto result = retrieval::search(ix, retrieval::parse_query(text), k);
        warn(err, result.query.warnings);
        retrieval::write_run(out, qid, result.ranking);
      }
    } else if (eval_map->parsed()) {
      auto run_in = open_input(run_path);
      auto qrels_in = open_input(qrels_path);
      const auto run_file = retrieval::read_run(run_in);
      const auto qrels = retrieval::read_qrels(qrels_in);
      out << textio::format_real(retrieval::evaluate_map(run_file, qrels)) << '\n';
    } else if (qlm_train->parsed()) {
      const auto ix = corpus::load_index(train_index);
      const auto phrases = phrases_from(phrases_path);
      qlm::ObservationSet obs;
      std::string label;
      if (train_doc) {
        obs = qlm::document_observations(ix, *train_doc, phrases);
        label = *train_doc;
      } else if (train_query) {
        obs = qlm::text_observations(ix, corpus::tokenize(*train_query), phrases);
        label = "query";
      } else {
        throw UsageError("qlm train needs --doc or --query");
      }
      warn(err, obs.warnings);
      auto model =
          qlm::estimate_rho(obs.observations, max_iters, qlm_tol.value_or(cfg.tolerance));
      model.label = label;
      if (!model.converged) {
        throw NumericError("qlm train: no convergence within " + std::to_string(max_iters) +
                           " iterations");
      }
      qlm::save_model(model, model_out);
      err << "trained '" << label << "' on " << model.support.size() << " terms in "
          << model.iterations << " iterations\n";
    } else if (qlm_rank->parsed()) {
      const auto q = qlm::load_model(query_model);
      std::vector<qlm::QlmModel> docs;
      for (const auto& p : doc_models) docs.push_back(qlm::load_model(p));
      const auto ranked = qlm::rank_models(q, docs, smoothing.value_or(cfg.smoothing));
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        out << (k + 1) << '\t' << ranked[k].label << '\t'
            << textio::format_real(ranked[k].divergence) << '\n';
      }
    } else if (hypo->parsed()) {
      auto in = open_input(densities_path);
      std::map<std::string, std::vector<RealVector>> contexts;
      for (auto& nv : textio::read_vectors<Real>(in)) {
        contexts[nv.name].push_back(std::move(nv.coords));
      }
      const auto ctx = [&](const std::string& name) -> const std::vector<RealVector>& {
        const auto it = contexts.find(name);
        if (it == contexts.end()) throw UnknownTermError(name);
        return it->second;
      };
      const auto a = density::word_density<Real>(ctx(hypo_a));
      const auto b = density::word_density<Real>(ctx(hypo_b));
      const auto report = density::hyponymy_grade(a, b);
      out << "grade\t" << textio::format_real(report.grade) << '\n'
          << "trace_e\t" << textio::format_real(report.trace_e) << '\n';
    } else if (comp_verb->parsed() || comp_sent->parsed()) {
      auto tin = open_input(triples_path);
      const auto triples = compose::read_triples(tin);
      const auto nouns = vector_map<Real>(vectors_path);
      const auto pairs = compose::pairs_for_verb(triples, verb_name);
      if (pairs.empty()) throw UnknownTermError(verb_name);
      const auto verb = compose::verb_tensor<Real>(pairs, nouns);
      if (comp_verb->parsed()) {
        write_tensor(out, verb);
      } else {
        write_tensor(out, compose::compose_sentence<Real>(lookup(nouns, subj_name), verb,
                                                          lookup(nouns, obj_name)));
      }
    } else if (bind_cmd->parsed() || unbind_cmd->parsed()) {
      const auto mode = parse_mode(mode_name);
      const bool is_bind = bind_cmd->parsed();
      if (out_name.empty()) out_name = is_bind ? "bound" : "unbound";
      auto emit = [&]<Field F>(const std::map<std::string, Vector<F>>& vs) {
        Vector<F> result = is_bind
                               ? compose::bind<F>(lookup(vs, bind_a), lookup(vs, bind_b), mode)
                               : compose::unbind<F>(lookup(vs, bind_c), lookup(vs, bind_a), mode);
        out << out_name << '\t' << textio::format_vector<F>(result) << '\n';
        if (cleanup && !is_bind) {
          std::pair<std::string, double> best{"", -2.0};
          for (const auto& [name, v] : vs) {
            if (v.norm() == 0.0 || result.norm() == 0.0) continue;
            const double c = compose::cosine_similarity<F>(result, v);
            if (c > best.second) best = {name, c};
          }
          out << "nearest\t" << best.first << '\t' << textio::format_real(best.second) << '\n';
        }
      };
      if (mode == compose::BindMode::kPhaseAddition) {
        emit(vector_map<Complex>(vectors_path));
      } else {
        emit(vector_map<Real>(vectors_path));
      }
    } else if (psi->parsed()) {
      auto in = open_input(facts_path);
      const auto facts = compose::read_facts(in);
      const auto store = compose::psi_encode(
          compose::RelationStore(psi_dim, seed.value_or(cfg.seed), parse_mode(psi_mode)), facts);
      const auto probe = compose::psi_query(store, psi_concept, psi_relation);
      const auto [name, cos] = compose::nearest_concept(store, probe);
      out << "nearest\t" << name << '\t' << textio::format_real(cos) << '\n';
    } else if (fourier->parsed()) {
      const auto f = wave == "square"   ? harmonics::SampledFunction::square_wave()
                     : wave == "sine"   ? harmonics::SampledFunction::sine(wave_k)
                     : wave == "cosine" ? harmonics::SampledFunction::cosine(wave_k)
                                        : harmonics::SampledFunction::constant(wave_c);
      const auto c = harmonics::fourier_coeffs(f, num_harmonics, quad_points);
      out << "# a=";
      for (std::size_t k = 0; k < c.a.size(); ++k) {
        out << (k ? "," : "") << textio::format_real(c.a[k]);
      }
      out << "\n# b=";
      for (std::size_t k = 0; k < c.b.size(); ++k) {
        out << (k ? "," : "") << textio::format_real(c.b[k]);
      }
      out << "\nx,f(x),partial_sum_" << num_harmonics << '\n';
      const double two_pi = 2.0 * std::numbers::pi;
      for (std::size_t i = 0; i < samples; ++i) {
        const double x = two_pi * static_cast<double>(i) / static_cast<double>(samples - 1);
        out << textio::format_real(x) << ',' << textio::format_real(f(x)) << ','
            << textio::format_real(harmonics::partial_sum(c, x)) << '\n';
      }
    }
  } catch (const UsageError& e) {
    err << "ERROR " << kExitUsage << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << "ERROR " << code << ": " << e.what() << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "ERROR " << kExitData << ": " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace qsem::cli
