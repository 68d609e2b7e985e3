#include "ufcm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ufcm/random.hpp"

namespace ufcm {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kRecordFormat = "ufcm-result";
constexpr int kRecordVersion = 1;
constexpr std::uint64_t kEvalStream = 0xE7A1;

std::string number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* begin = s.data();
    if (!s.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("cannot parse " + what + " value '" + s + "'");
    return v;
}

long long parse_integer(const std::string& s, const std::string& what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("cannot parse " + what + " value '" + s + "'");
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("write failed for " + path.string());
}

std::string indexed_name(const char* stem, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04d.%s", stem, index, ext);
    return buf;
}

json config_to_json(const SolverConfig& c) {
    return json{{"alpha", c.alpha},       {"beta", c.beta},         {"p", c.p},
                {"clusters", c.clusters}, {"d_prime", c.projection_dim()},
                {"restarts", c.restarts}, {"max_iter", c.max_iter}, {"tol", c.tol},
                {"eps_row", c.eps_row},   {"kmeans_max_iter", c.kmeans_max_iter},
                {"seed", c.seed}};
}

SolverConfig config_from_json(const json& j) {
    SolverConfig c;
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.p = j.at("p").get<double>();
    c.clusters = j.at("clusters").get<int>();
    c.d_prime = j.at("d_prime").get<int>();
    c.restarts = j.at("restarts").get<int>();
    c.max_iter = j.at("max_iter").get<int>();
    c.tol = j.at("tol").get<double>();
    c.eps_row = j.at("eps_row").get<double>();
    c.kmeans_max_iter = j.at("kmeans_max_iter").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json scores_to_json(const ClusteringScores& s) {
    return json{{"acc_mean", s.acc_mean}, {"acc_std", s.acc_std}, {"nmi_mean", s.nmi_mean},
                {"nmi_std", s.nmi_std},   {"acc_runs", s.acc_runs}, {"nmi_runs", s.nmi_runs}};
}

ClusteringScores scores_from_json(const json& j) {
    ClusteringScores s;
    s.acc_mean = j.at("acc_mean").get<double>();
    s.acc_std = j.at("acc_std").get<double>();
    s.nmi_mean = j.at("nmi_mean").get<double>();
    s.nmi_std = j.at("nmi_std").get<double>();
    s.acc_runs = j.at("acc_runs").get<std::vector<double>>();
    s.nmi_runs = j.at("nmi_runs").get<std::vector<double>>();
    return s;
}

std::vector<Index> default_counts(Index d) {
    std::set<Index> counts;
    for (Index k = 1; k <= 5; ++k) counts.insert(std::max<Index>(1, d * k / 5));
    return {counts.begin(), counts.end()};
}

ResultRecord run_point(const DataMatrix& data, const ExperimentSpec& spec, const SolverConfig& cfg,
                       int grid_index, const std::vector<Index>& counts) {
    using clock = std::chrono::steady_clock;
    ResultRecord rec;
    rec.grid_index = grid_index;
    rec.config = cfg;
    rec.config.d_prime = static_cast<int>(cfg.projection_dim());
    rec.eval_runs = spec.eval_runs;
    rec.eval_seed = derive_seed(cfg.seed, kEvalStream);

    const auto t0 = clock::now();
    const SolverResult result = solve(data.values, cfg);
    const auto t1 = clock::now();
    rec.converged = result.converged;
    rec.iterations = result.iterations;
    rec.trace = result.trace;
    rec.ranking = rank_features(result.w);
    for (Index m : counts) {
        SelectionScore sel;
        sel.m = m;
        sel.features.assign(rec.ranking.order.begin(), rec.ranking.order.begin() + m);
        if (data.has_labels())
            sel.scores = evaluate_clustering(data, rec.ranking, m, cfg.clusters, spec.eval_runs, rec.eval_seed,
                                             cfg.kmeans_max_iter);
        rec.selections.push_back(std::move(sel));
    }
    const auto t2 = clock::now();
    rec.times.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.times.evaluate_seconds = std::chrono::duration<double>(t2 - t1).count();
    return rec;
}

void summary_row(std::string& out, const std::string& grid, const std::string& a, const std::string& b,
                 const std::string& p, Index m, const std::string& method, const ClusteringScores& s) {
    out += grid + ',' + a + ',' + b + ',' + p + ',' + std::to_string(m) + ',' + method + ',' +
           number(s.acc_mean) + ',' + number(s.acc_std) + ',' + number(s.nmi_mean) + ',' +
           number(s.nmi_std) + '\n';
}

}  // namespace

std::vector<GridPoint> ExperimentSpec::grid_points() const {
    const std::vector<double> as = grid_alpha.empty() ? std::vector<double>{solver.alpha} : grid_alpha;
    const std::vector<double> bs = grid_beta.empty() ? std::vector<double>{solver.beta} : grid_beta;
    const std::vector<double> ps = grid_p.empty() ? std::vector<double>{solver.p} : grid_p;
    std::vector<GridPoint> out;
    for (double a : as)
        for (double b : bs)
            for (double p : ps) out.push_back({a, b, p});
    return out;
}

void ExperimentSpec::validate() const {
    if (input.has_value() == synthetic.has_value())
        throw ConfigError("exactly one of an input file or a synthetic generator is required");
    if (eval_runs < 1) throw ConfigError("eval runs must be positive");
    if (jobs < 1) throw ConfigError("jobs must be positive");
    for (Index m : select_counts)
        if (m < 1) throw ConfigError("selected feature counts must be positive");
    for (const GridPoint& g : grid_points()) {
        SolverConfig c = solver;
        c.alpha = g.alpha;
        c.beta = g.beta;
        c.p = g.p;
        if (c.clusters == 0) c.clusters = 1;  // resolved once the data is known
        c.validate();
    }
}

BlobSpec parse_blob_spec(const std::string& text) {
    std::string body = text;
    if (body.rfind("blobs:", 0) == 0) body = body.substr(6);
    else if (body == "blobs") body.clear();
    BlobSpec spec;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("synthetic spec entry '" + item + "' lacks '='");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        if (key == "n") spec.n_per_cluster = parse_integer(value, key);
        else if (key == "c") spec.clusters = static_cast<int>(parse_integer(value, key));
        else if (key == "informative") spec.d_informative = parse_integer(value, key);
        else if (key == "noise") spec.d_noise = parse_integer(value, key);
        else if (key == "sep") spec.separation = parse_double(value, key);
        else if (key == "scale") spec.noise_scale = parse_double(value, key);
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_integer(value, key));
        else throw ConfigError("unknown synthetic spec key '" + key + "'");
    }
    if (spec.n_per_cluster < 1 || spec.clusters < 1 || spec.d_informative < 1 || spec.d_noise < 0)
        throw ConfigError("synthetic spec counts must be positive");
    if (!(spec.separation > 0.0) || !(spec.noise_scale >= 0.0))
        throw ConfigError("synthetic spec needs sep > 0 and scale >= 0");
    return spec;
}

std::string format_blob_spec(const BlobSpec& s) {
    return "blobs:n=" + std::to_string(s.n_per_cluster) + ",c=" + std::to_string(s.clusters) +
           ",informative=" + std::to_string(s.d_informative) + ",noise=" + std::to_string(s.d_noise) +
           ",sep=" + number(s.separation) + ",scale=" + number(s.noise_scale) +
           ",seed=" + std::to_string(s.seed);
}

DataMatrix prepare_dataset(const ExperimentSpec& spec, std::string* source, std::string* preprocessing) {
    DataMatrix raw;
    if (spec.input) {
        raw = load_csv(*spec.input, spec.csv);
        if (source) *source = spec.input->string();
    } else {
        raw = make_blobs(*spec.synthetic);
        if (source) *source = format_blob_spec(*spec.synthetic);
    }
    if (spec.unit_variance) raw = scale_unit_variance(raw);
    if (preprocessing) *preprocessing = spec.unit_variance ? "unit_variance+center" : "center";
    return center(raw).first;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    std::string source;
    std::string preprocessing;
    const DataMatrix data = prepare_dataset(spec, &source, &preprocessing);

    SolverConfig base = spec.solver;
    if (base.clusters == 0) {
        if (!data.has_labels()) throw ConfigError("cluster count not given and the input has no labels");
        base.clusters = data.class_count();
    }
    std::vector<Index> counts = spec.select_counts.empty() ? default_counts(data.features()) : spec.select_counts;
    for (Index m : counts)
        if (m > data.features())
            throw ConfigError("selected feature count " + std::to_string(m) + " exceeds feature count " +
                              std::to_string(data.features()));

    const auto points = spec.grid_points();
    std::vector<SolverConfig> configs;
    for (const GridPoint& g : points) {
        SolverConfig c = base;
        c.alpha = g.alpha;
        c.beta = g.beta;
        c.p = g.p;
        c.validate(data.features(), data.samples());
        configs.push_back(c);
    }

    std::filesystem::create_directories(spec.out);
    const std::string hash = hex64(content_hash(data));

    ExperimentOutcome outcome;
    outcome.records.resize(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            try {
                ResultRecord rec = run_point(data, spec, configs[k], static_cast<int>(k), counts);
                rec.source = source;
                rec.content_hash = hash;
                rec.features = data.features();
                rec.samples = data.samples();
                rec.classes = data.class_count();
                rec.preprocessing = preprocessing;
                write_file(spec.out / indexed_name("record", rec.grid_index, "json"), record_to_text(rec));
                emit_trace(rec.trace, spec.out / indexed_name("trace", rec.grid_index, "csv"));
                outcome.records[k] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = configs.size();
            }
        }
    };
    const int threads = std::min<int>(spec.jobs, static_cast<int>(configs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    // Baselines do not depend on the grid; same evaluation seeds as the records.
    if (data.has_labels()) {
        const std::uint64_t eval_seed = derive_seed(base.seed, kEvalStream);
        const FeatureRanking variance = max_variance_ranking(data);
        for (Index m : counts)
            outcome.baselines.push_back({"max_variance", m,
                                         evaluate_clustering(data, variance, m, base.clusters, spec.eval_runs,
                                                             eval_seed, base.kmeans_max_iter)});
        outcome.baselines.push_back({"all_features", data.features(),
                                     evaluate_clustering(data, base.clusters, spec.eval_runs, eval_seed,
                                                         base.kmeans_max_iter)});
    }

    std::string summary = "grid_index,alpha,beta,p,m,method,acc_mean,acc_std,nmi_mean,nmi_std\n";
    const ResultRecord* best = nullptr;
    const SelectionScore* best_sel = nullptr;
    for (const ResultRecord& rec : outcome.records)
        for (const SelectionScore& sel : rec.selections) {
            if (!sel.scores) continue;
            summary_row(summary, std::to_string(rec.grid_index), number(rec.config.alpha), number(rec.config.beta),
                        number(rec.config.p), sel.m, "ufcm", *sel.scores);
            if (!best_sel || sel.scores->acc_mean > best_sel->scores->acc_mean) {
                best = &rec;
                best_sel = &sel;
            }
        }
    for (const BaselineScore& b : outcome.baselines) summary_row(summary, "", "", "", "", b.m, b.method, b.scores);
    write_file(spec.out / "summary.csv", summary);

    if (best_sel) {
        std::string oracle = "selection,grid_index,alpha,beta,p,m,method,acc_mean,acc_std,nmi_mean,nmi_std\n";
        oracle += "oracle_best_by_acc,";
        summary_row(oracle, std::to_string(best->grid_index), number(best->config.alpha),
                    number(best->config.beta), number(best->config.p), best_sel->m, "ufcm", *best_sel->scores);
        write_file(spec.out / "oracle_best.csv", oracle);
    }

    std::string timing = "grid_index,solve_seconds,evaluate_seconds\n";
    for (const ResultRecord& rec : outcome.records)
        timing += std::to_string(rec.grid_index) + ',' + number(rec.times.solve_seconds) + ',' +
                  number(rec.times.evaluate_seconds) + '\n';
    write_file(spec.out / "timing.csv", timing);
    return outcome;
}

void emit_trace(const SolverTrace& trace, std::ostream& out) {
    std::string buf = "iteration,objective,fit,scatter,regularizer_pow_p,assignment_changes\n";
    for (const TraceRecord& r : trace.records) {
        buf += std::to_string(r.iteration) + ',' + number(r.terms.value) + ',' + number(r.terms.fit) + ',' +
               number(r.terms.scatter) + ',' + number(r.terms.regularizer_pow_p) + ',' +
               std::to_string(r.assignment_changes) + '\n';
    }
    out << buf;
}

void emit_trace(const SolverTrace& trace, const std::filesystem::path& path) {
    std::ostringstream ss;
    emit_trace(trace, ss);
    write_file(path, ss.str());
}

SolverTrace read_trace(std::istream& in) {
    SolverTrace trace;
    std::string line;
    if (!std::getline(in, line) || line.rfind("iteration,", 0) != 0)
        throw DataError("trace file lacks its header line");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw CsvError("trace row needs 6 fields", line_no, 0);
        TraceRecord r;
        r.iteration = static_cast<int>(parse_integer(cells[0], "iteration"));
        r.terms.value = parse_double(cells[1], "objective");
        r.terms.fit = parse_double(cells[2], "fit");
        r.terms.scatter = parse_double(cells[3], "scatter");
        r.terms.regularizer_pow_p = parse_double(cells[4], "regularizer");
        r.assignment_changes = parse_integer(cells[5], "assignment_changes");
        trace.records.push_back(r);
    }
    return trace;
}

SolverTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return read_trace(in);
}

std::string record_to_text(const ResultRecord& rec) {
    json trace = json::array();
    for (const TraceRecord& r : rec.trace.records)
        trace.push_back({{"iteration", r.iteration},
                         {"objective", r.terms.value},
                         {"fit", r.terms.fit},
                         {"scatter", r.terms.scatter},
                         {"regularizer_pow_p", r.terms.regularizer_pow_p},
                         {"assignment_changes", r.assignment_changes},
                         {"orthonormality_error", r.orthonormality_error}});
    json selections = json::array();
    for (const SelectionScore& s : rec.selections) {
        json j{{"m", s.m}, {"features", s.features}};
        j["scores"] = s.scores ? scores_to_json(*s.scores) : json(nullptr);
        selections.push_back(std::move(j));
    }
    std::vector<double> scores(rec.ranking.scores.data(), rec.ranking.scores.data() + rec.ranking.scores.size());
    json j{{"format", kRecordFormat},
           {"version", kRecordVersion},
           {"grid_index", rec.grid_index},
           {"input",
            {{"source", rec.source},
             {"content_hash", rec.content_hash},
             {"features", rec.features},
             {"samples", rec.samples},
             {"classes", rec.classes},
             {"preprocessing", rec.preprocessing}}},
           {"config", config_to_json(rec.config)},
           {"evaluation", {{"runs", rec.eval_runs}, {"seed", rec.eval_seed}}},
           {"solver", {{"converged", rec.converged}, {"iterations", rec.iterations}}},
           {"trace", std::move(trace)},
           {"ranking", {{"order", rec.ranking.order}, {"scores", scores}}},
           {"selections", std::move(selections)}};
    return j.dump(2) + "\n";
}

ResultRecord record_from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("result record is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kRecordFormat || j.at("version").get<int>() != kRecordVersion)
            throw DataError("unsupported result record format");
        ResultRecord rec;
        rec.grid_index = j.at("grid_index").get<int>();
        const json& in = j.at("input");
        rec.source = in.at("source").get<std::string>();
        rec.content_hash = in.at("content_hash").get<std::string>();
        rec.features = in.at("features").get<Index>();
        rec.samples = in.at("samples").get<Index>();
        rec.classes = in.at("classes").get<int>();
        rec.preprocessing = in.at("preprocessing").get<std::string>();
        rec.config = config_from_json(j.at("config"));
        rec.config.validate(rec.features, rec.samples);
        rec.eval_runs = j.at("evaluation").at("runs").get<int>();
        rec.eval_seed = j.at("evaluation").at("seed").get<std::uint64_t>();
        rec.converged = j.at("solver").at("converged").get<bool>();
        rec.iterations = j.at("solver").at("iterations").get<int>();
        for (const json& r : j.at("trace")) {
            TraceRecord t;
            t.iteration = r.at("iteration").get<int>();
            t.terms.value = r.at("objective").get<double>();
            t.terms.fit = r.at("fit").get<double>();
            t.terms.scatter = r.at("scatter").get<double>();
            t.terms.regularizer_pow_p = r.at("regularizer_pow_p").get<double>();
            t.assignment_changes = r.at("assignment_changes").get<Index>();
            t.orthonormality_error = r.at("orthonormality_error").get<double>();
            rec.trace.records.push_back(t);
        }
        rec.ranking.order = j.at("ranking").at("order").get<std::vector<Index>>();
        const auto scores = j.at("ranking").at("scores").get<std::vector<double>>();
        rec.ranking.scores = Eigen::Map<const Eigen::VectorXd>(scores.data(), static_cast<Index>(scores.size()));
        for (const json& s : j.at("selections")) {
            SelectionScore sel;
            sel.m = s.at("m").get<Index>();
            sel.features = s.at("features").get<std::vector<Index>>();
            if (!s.at("scores").is_null()) sel.scores = scores_from_json(s.at("scores"));
            rec.selections.push_back(std::move(sel));
        }
        return rec;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed result record: ") + e.what());
    }
}

ResultRecord load_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return record_from_text(ss.str());
}

}  // namespace ufcm
