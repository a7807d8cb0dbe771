// Command-line front end: ingest a corpus into a stats snapshot, run queries
// and summaries, the agreement experiments, and the surrogate analyses.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgtidf/hgtidf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

#ifndef HGTIDF_DEFAULT_STOPWORDS
#define HGTIDF_DEFAULT_STOPWORDS "data/stopwords_en.txt"
#endif

namespace {

std::ofstream open_output(fs::path const& path)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw hgtidf::Error("cannot open for writing: " + path.string());
    }
    return out;
}

void write_text(fs::path const& path, std::string const& text)
{
    auto out = open_output(path);
    out << text;
    if (!out) {
        throw hgtidf::Error("failed writing " + path.string());
    }
}

std::string dump(json const& j) { return j.dump(2) + "\n"; }

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
    std::string corpus;
    std::string format = "jsonl";
    std::string out;
    std::string stopwords = HGTIDF_DEFAULT_STOPWORDS;
    bool no_stopwords = false;
    bool keep_non_ascii = false;
    bool no_number_words = false;
    std::string normalizer = "none";
};

void cmd_ingest(IngestArgs const& a)
{
    std::vector<hgtidf::RawDocument> raw;
    if (a.format == "jsonl") {
        raw = hgtidf::ingest_jsonl(a.corpus);
    } else if (a.format == "txt") {
        raw = hgtidf::ingest_txt_dir(a.corpus);
    } else if (a.format == "nysk") {
        raw = hgtidf::ingest_nysk_xml(a.corpus);
    } else {
        throw hgtidf::Error("unknown corpus format \"" + a.format + "\"");
    }

    hgtidf::PipelineConfig cfg;
    cfg.strip_non_ascii = !a.keep_non_ascii;
    cfg.number_to_words = !a.no_number_words;
    cfg.normalizer = a.normalizer == "simple_suffix" ? hgtidf::Normalizer::simple_suffix : hgtidf::Normalizer::none;
    if (a.normalizer != "none" && a.normalizer != "simple_suffix") {
        throw hgtidf::Error("unknown normalizer \"" + a.normalizer + "\"");
    }
    if (!a.no_stopwords) {
        cfg.stopwords = hgtidf::load_stopwords(a.stopwords, cfg.punctuation);
    }
    auto const docs = hgtidf::preprocess_all(raw, cfg);
    auto const stats = hgtidf::build_stats(docs);

    fs::create_directories(a.out);
    hgtidf::save_snapshot(stats, fs::path(a.out) / "stats.bin");
    json summary;
    summary["documents"] = stats.num_docs();
    summary["vocabulary"] = stats.num_terms();
    summary["tokens"] = stats.total_tokens();
    summary["nonzeros"] = stats.num_nonzeros();
    summary["format"] = a.format;
    summary["snapshot_version"] = hgtidf::kSnapshotVersion;
    write_text(fs::path(a.out) / "summary.json", dump(summary));
    std::cout << "N=" << stats.num_docs() << " M=" << stats.num_terms() << " tokens=" << stats.total_tokens()
              << "\n";
}

// ---- query / summarize -----------------------------------------------------

struct QueryArgs {
    std::string snapshot;
    std::vector<std::string> terms;
    std::string scorer = "tp_idf";
    std::size_t k = 10;
    std::uint64_t seed = 0;
    std::string out;
};

void emit_table(std::string const& table, std::string const& out)
{
    std::cout << table;
    if (!out.empty()) {
        write_text(out, table);
    }
}

void cmd_query(QueryArgs const& a)
{
    auto const stats = hgtidf::load_snapshot(a.snapshot);
    auto const query = hgtidf::make_query(stats, a.terms);
    auto const ranking = hgtidf::top_documents(stats, hgtidf::parse_scorer(a.scorer), query, a.seed, a.k);
    std::ostringstream table;
    table << "rank,doc_id,score\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        auto const& item = ranking.items[i];
        table << i + 1 << ',' << stats.doc_name(hgtidf::DocId{item.id}) << ','
              << hgtidf::format_fixed(item.score) << '\n';
    }
    emit_table(table.str(), a.out);
}

struct SummarizeArgs {
    std::string snapshot;
    std::string doc;
    std::string scorer = "fisher";
    std::size_t m = 10;
    std::uint64_t seed = 0;
    bool pad = false;
    std::string out;
};

void cmd_summarize(SummarizeArgs const& a)
{
    auto const stats = hgtidf::load_snapshot(a.snapshot);
    auto const ranking = hgtidf::summarize_document(stats, hgtidf::parse_scorer(a.scorer), stats.doc_id(a.doc), a.m,
                                                    a.seed, a.pad);
    std::ostringstream table;
    table << "rank,term,score\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        auto const& item = ranking.items[i];
        table << i + 1 << ',' << stats.term(hgtidf::TermId{item.id}) << ',' << hgtidf::format_fixed(item.score)
              << '\n';
    }
    emit_table(table.str(), a.out);
}

// ---- experiment --------------------------------------------------------------

struct ExperimentArgs {
    std::string snapshot;
    std::string which;
    std::uint64_t seed = 0;
    std::string out = ".";
    unsigned threads = 1;
    std::size_t k = 10;
    std::vector<hgtidf::Count> cutoffs{1, 10, 100, 1000};
    std::vector<std::string> pairs;
    std::size_t total_bursty = 106;
    std::size_t num_common = 6;
    hgtidf::Count min_doc_freq = 10;
    std::size_t random_trials = 1;
    bool independent_tiebreak = false;
};

void cmd_experiment(ExperimentArgs const& a)
{
    auto const stats = hgtidf::load_snapshot(a.snapshot);
    hgtidf::AgreementOptions opt;
    opt.seed = a.seed;
    opt.k = a.k;
    opt.threads = a.threads;
    opt.random_trials = a.random_trials;
    opt.shared_tiebreak = !a.independent_tiebreak;
    for (auto const& p : a.pairs) {
        opt.pairs.push_back(hgtidf::parse_pair(p));
    }

    hgtidf::ExperimentResult result;
    if (a.which == "one_term") {
        result = hgtidf::run_one_term_experiment(stats, a.cutoffs, opt);
    } else if (a.which == "two_term") {
        auto const pools = hgtidf::select_bursty_pools(stats, {a.total_bursty, a.num_common, a.min_doc_freq});
        result = hgtidf::run_two_term_experiment(stats, pools, opt);
        std::ostringstream table;
        hgtidf::write_two_term_table_csv(table, result);
        write_text(fs::path(a.out) / "two_term_table.csv", table.str());
    } else if (a.which == "summarization") {
        result = hgtidf::run_summarization_experiment(stats, opt);
        std::ostringstream hist;
        hgtidf::write_histogram_csv(hist, result.histograms);
        write_text(fs::path(a.out) / "summarization_histogram.csv", hist.str());
    } else {
        throw hgtidf::Error("unknown experiment \"" + a.which + "\"");
    }
    std::ostringstream rows;
    hgtidf::write_rows_csv(rows, result.rows);
    write_text(fs::path(a.out) / (a.which + ".csv"), rows.str());
    write_text(fs::path(a.out) / (a.which + ".json"), dump(hgtidf::to_json(result)));
    std::cout << rows.str();
}

// ---- surrogate -----------------------------------------------------------------

struct SurrogateArgs {
    std::string which;
    std::string function = "f";
    std::size_t resolution = 50;
    double beta = 2.47;
    double alpha = 1.0;
    double lambda = 1.0;
    hgtidf::Count n = 100;
    std::string out = ".";
    std::string snapshot;
    std::string points;
    hgtidf::Count min_doc_freq = 1;
    hgtidf::Count max_total = 30;
    std::size_t random_tuples = 0;
    hgtidf::Count random_max_total = 1000000;
    std::uint64_t seed = 0;
    double theta = std::numbers::pi / 4;
};

std::vector<hgtidf::ScatterPoint> read_points_csv(fs::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw hgtidf::Error("cannot open points file: " + path.string());
    }
    std::vector<hgtidf::ScatterPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line_no == 1 && line.find_first_of("xX") != std::string::npos)) {
            continue;
        }
        auto const comma = line.find(',');
        try {
            if (comma == std::string::npos) {
                throw std::invalid_argument("missing comma");
            }
            points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (std::exception const&) {
            throw hgtidf::ParseError(path.string() + ":" + std::to_string(line_no) + ": expected x,y");
        }
    }
    return points;
}

json sweep_json(hgtidf::ChvatalSweep const& s)
{
    json j;
    j["tuples"] = s.tuples;
    j["violations"] = s.violations;
    j["min_gap"] = s.min_gap;
    j["max_gap"] = s.max_gap;
    j["mean_gap"] = s.mean_gap;
    j["worst_relative_gap"] = s.worst_relative_gap;
    return j;
}

void cmd_surrogate(SurrogateArgs const& a)
{
    hgtidf::SurrogateParams const params{a.beta, a.alpha, a.lambda, a.n};
    fs::path const out(a.out);
    if (a.which == "grid") {
        auto const grid = hgtidf::emit_contour_grid(params, hgtidf::parse_grid_function(a.function), a.resolution);
        std::ostringstream csv;
        hgtidf::write_grid_csv(csv, grid);
        auto const file = out / ("grid_" + a.function + ".csv");
        write_text(file, csv.str());
        std::cout << "wrote " << grid.size() << " points to " << file.string() << "\n";
    } else if (a.which == "regress") {
        std::vector<hgtidf::ScatterPoint> points;
        if (!a.snapshot.empty()) {
            points = hgtidf::idf_scatter(hgtidf::load_snapshot(a.snapshot), a.min_doc_freq);
        } else if (!a.points.empty()) {
            points = read_points_csv(a.points);
        } else {
            throw hgtidf::Error("regress needs --snapshot or --points");
        }
        auto const fit = hgtidf::fit_ols(points);
        json j;
        j["beta_hat"] = fit.beta_hat;
        j["alpha_hat"] = fit.alpha_hat;
        j["r_squared"] = fit.r_squared;
        j["n_points"] = fit.n_points;
        write_text(out / "regression.json", dump(j));
        std::ostringstream csv;
        hgtidf::write_scatter_csv(csv, points);
        write_text(out / "regression_scatter.csv", csv.str());
        std::cout << dump(j);
    } else if (a.which == "chvatal") {
        json j;
        auto const exhaustive = hgtidf::chvatal_sweep_exhaustive(a.max_total);
        j["exhaustive_max_total"] = a.max_total;
        j["exhaustive"] = sweep_json(exhaustive);
        auto violations = exhaustive.violations;
        if (a.random_tuples > 0) {
            auto const random = hgtidf::chvatal_sweep_random(a.random_tuples, a.random_max_total, a.seed);
            j["random_max_total"] = a.random_max_total;
            j["random_seed"] = a.seed;
            j["random"] = sweep_json(random);
            violations += random.violations;
        }
        j["violations"] = violations;
        write_text(out / "chvatal.json", dump(j));
        std::cout << dump(j);
    } else if (a.which == "taylor") {
        std::ostringstream csv;
        csv << "lambda,p,q,exact,taylor,taylor_corrected,relative_gap,relative_gap_corrected\n";
        for (double lam : {0.1, 0.01, 0.001}) {
            hgtidf::SurrogateParams pl = params;
            pl.lambda = lam;
            for (int pi = 2; pi <= 9; ++pi) {
                double const p = pi / 10.0;
                for (int qi = 1; qi / 100.0 <= p / 2 + 1e-12; ++qi) {
                    double const q = qi / 100.0;
                    double const exact = hgtidf::g_scaled(p, q, pl, hgtidf::ScaledMode::exact);
                    double const taylor = hgtidf::g_scaled(p, q, pl, hgtidf::ScaledMode::taylor);
                    double const corrected = hgtidf::g_scaled(p, q, pl, hgtidf::ScaledMode::taylor_corrected);
                    csv << hgtidf::format_fixed(lam, 3) << ',' << hgtidf::format_fixed(p, 2) << ','
                        << hgtidf::format_fixed(q, 2) << ',' << hgtidf::format_fixed(exact, 9) << ','
                        << hgtidf::format_fixed(taylor, 9) << ',' << hgtidf::format_fixed(corrected, 9) << ','
                        << hgtidf::format_fixed(std::abs(exact - taylor) / std::abs(exact), 9) << ','
                        << hgtidf::format_fixed(std::abs(exact - corrected) / std::abs(exact), 9) << '\n';
                }
            }
        }
        write_text(out / "taylor.csv", csv.str());
        std::cout << "wrote " << (out / "taylor.csv").string() << "\n";
    } else if (a.which == "polar") {
        std::ostringstream csv;
        csv << "epsilon,f_exact,f_published,g_exact,g_published,f_ratio,g_ratio,f_limit,g_limit\n";
        for (int e = 2; e <= 12; ++e) {
            double const eps = std::pow(10.0, -e);
            if (eps * (std::cos(a.theta) + std::sin(a.theta)) >= params.lambda) {
                continue;  // mapped point would have q >= p
            }
            hgtidf::PolarPoint const pt{eps, a.theta};
            double const fe = hgtidf::f_polar(pt, params, hgtidf::PolarMode::exact_map);
            double const fp = hgtidf::f_polar(pt, params, hgtidf::PolarMode::published);
            double const ge = hgtidf::g_polar(pt, params, hgtidf::PolarMode::exact_map);
            double const gp = hgtidf::g_polar(pt, params, hgtidf::PolarMode::published);
            double const L = std::log(1.0 / eps);
            char buffer[320];
            std::snprintf(buffer, sizeof buffer, "%.0e,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", eps,
                          fe, fp, ge, gp, fe / L, ge / L, params.lambda * params.beta,
                          static_cast<double>(params.n) * params.lambda);
            csv << buffer;
        }
        write_text(out / "polar.csv", csv.str());
        std::cout << csv.str();
    } else {
        throw hgtidf::Error("unknown surrogate analysis \"" + a.which + "\"");
    }
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
    hgtidf::SyntheticParams params;
    std::string out;
};

void cmd_synth(SynthArgs const& a)
{
    auto const docs = hgtidf::generate_bursty_corpus(a.params);
    std::ostringstream lines;
    for (auto const& d : docs) {
        std::string text;
        for (auto const& t : d.tokens) {
            if (!text.empty()) {
                text.push_back(' ');
            }
            text += t;
        }
        lines << json{{"id", d.doc_id}, {"text", text}}.dump() << '\n';
    }
    write_text(a.out, lines.str());
    std::cout << "wrote " << docs.size() << " documents to " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Term scoring with tp-idf and the Fisher exact test"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* sub_ingest = app.add_subcommand("ingest", "Build a stats snapshot from a corpus");
    sub_ingest->add_option("--corpus", ingest.corpus, "Corpus file or directory")->required();
    sub_ingest->add_option("--format", ingest.format, "jsonl | txt | nysk")
        ->check(CLI::IsMember({"jsonl", "txt", "nysk"}));
    sub_ingest->add_option("--out", ingest.out, "Output directory")->required();
    sub_ingest->add_option("--stopwords", ingest.stopwords, "Stopword list, one term per line");
    sub_ingest->add_flag("--no-stopwords", ingest.no_stopwords, "Keep stopwords");
    sub_ingest->add_flag("--keep-non-ascii", ingest.keep_non_ascii, "Keep tokens with non-ASCII bytes");
    sub_ingest->add_flag("--no-number-words", ingest.no_number_words, "Do not spell out integers");
    sub_ingest->add_option("--normalizer", ingest.normalizer, "none | simple_suffix");
    sub_ingest->callback([&] { cmd_ingest(ingest); });

    QueryArgs query;
    auto* sub_query = app.add_subcommand("query", "Rank documents for a query");
    sub_query->add_option("--snapshot", query.snapshot)->required();
    sub_query->add_option("--term", query.terms, "Query term (repeatable)")->required();
    sub_query->add_option("--scorer", query.scorer, "tp | idf | tf_idf | tp_idf | fisher | random");
    sub_query->add_option("--k", query.k, "Rows to print")->check(CLI::PositiveNumber);
    sub_query->add_option("--seed", query.seed, "Tie-break seed")->required();
    sub_query->add_option("--out", query.out, "Also write the table to this CSV file");
    sub_query->callback([&] { cmd_query(query); });

    SummarizeArgs summarize;
    auto* sub_sum = app.add_subcommand("summarize", "Top-m terms of a document");
    sub_sum->add_option("--snapshot", summarize.snapshot)->required();
    sub_sum->add_option("--doc", summarize.doc, "Document id")->required();
    sub_sum->add_option("--scorer", summarize.scorer);
    sub_sum->add_option("--m", summarize.m)->check(CLI::PositiveNumber);
    sub_sum->add_option("--seed", summarize.seed)->required();
    sub_sum->add_flag("--pad", summarize.pad, "Pad short documents with absent terms");
    sub_sum->add_option("--out", summarize.out);
    sub_sum->callback([&] { cmd_summarize(summarize); });

    ExperimentArgs exp;
    auto* sub_exp = app.add_subcommand("experiment", "Scorer agreement experiments");
    sub_exp->add_option("--snapshot", exp.snapshot)->required();
    sub_exp->add_option("--which", exp.which, "one_term | two_term | summarization")
        ->required()
        ->check(CLI::IsMember({"one_term", "two_term", "summarization"}));
    sub_exp->add_option("--seed", exp.seed)->required();
    sub_exp->add_option("--out", exp.out, "Output directory");
    sub_exp->add_option("--threads", exp.threads)->check(CLI::PositiveNumber);
    sub_exp->add_option("--k", exp.k, "Cutoff of P@k (m for summarization)")->check(CLI::PositiveNumber);
    sub_exp->add_option("--cutoffs", exp.cutoffs, "Document-frequency cutoffs C")->delimiter(',');
    sub_exp->add_option("--pairs", exp.pairs, "Scorer pairs such as fisher/tp_idf")->delimiter(',');
    sub_exp->add_option("--total-bursty", exp.total_bursty);
    sub_exp->add_option("--num-common", exp.num_common);
    sub_exp->add_option("--min-doc-freq", exp.min_doc_freq);
    sub_exp->add_option("--random-trials", exp.random_trials)->check(CLI::PositiveNumber);
    sub_exp->add_flag("--independent-tiebreak", exp.independent_tiebreak,
                      "Break ties independently for the two scorers of a pair");
    sub_exp->callback([&] { cmd_experiment(exp); });

    SurrogateArgs sur;
    auto* sub_sur = app.add_subcommand("surrogate", "Surrogate function analyses");
    sub_sur->add_option("--which", sur.which, "grid | regress | chvatal | taylor | polar")
        ->required()
        ->check(CLI::IsMember({"grid", "regress", "chvatal", "taylor", "polar"}));
    sub_sur->add_option("--function", sur.function, "f | g | f_scaled | g_scaled");
    sub_sur->add_option("--resolution", sur.resolution);
    sub_sur->add_option("--beta", sur.beta);
    sub_sur->add_option("--alpha", sur.alpha);
    sub_sur->add_option("--lambda", sur.lambda);
    sub_sur->add_option("--n", sur.n);
    sub_sur->add_option("--theta", sur.theta);
    sub_sur->add_option("--out", sur.out, "Output directory");
    sub_sur->add_option("--snapshot", sur.snapshot);
    sub_sur->add_option("--points", sur.points, "CSV of x,y points");
    sub_sur->add_option("--min-doc-freq", sur.min_doc_freq);
    sub_sur->add_option("--max-total", sur.max_total);
    sub_sur->add_option("--random", sur.random_tuples, "Random tuples to check");
    sub_sur->add_option("--random-max-total", sur.random_max_total);
    sub_sur->add_option("--seed", sur.seed);
    sub_sur->callback([&] { cmd_surrogate(sur); });

    SynthArgs synth;
    auto* sub_synth = app.add_subcommand("synth", "Write a synthetic bursty corpus as JSONL");
    sub_synth->add_option("--docs", synth.params.num_docs);
    sub_synth->add_option("--vocab", synth.params.vocab_size);
    sub_synth->add_option("--zipf", synth.params.zipf_exponent);
    sub_synth->add_option("--min-length", synth.params.min_doc_length);
    sub_synth->add_option("--max-length", synth.params.max_doc_length);
    sub_synth->add_option("--bursty", synth.params.bursty_terms);
    sub_synth->add_option("--seed", synth.params.seed)->required();
    sub_synth->add_option("--out", synth.out)->required();
    sub_synth->callback([&] { cmd_synth(synth); });

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const&) {
        std::cout << app.help();
        return 0;
    } catch (CLI::CallForAllHelp const&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (CLI::ParseError const& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        std::cerr << "error: " << message << "\n";
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    } catch (std::exception const& e) {
        std::string message = e.what();
        std::replace(message.begin(), message.end(), '\n', ' ');
        std::cerr << "error: " << message << "\n";
        return 1;
    }
    return 0;
}
