// veil: volume-hiding encrypted key-value store CLI.
//
// Subcommands: gen-data, setup, query, insert, delete, bench, analyze.
// Exit codes: 0 success, 1 internal error, 2 usage/IO error, 3 integrity
// failure. The VEIL_THREADS environment variable caps the bench worker pool.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "veil/analysis.hpp"
#include "veil/datagen.hpp"
#include "veil/engine.hpp"
#include "veil/outsource.hpp"

namespace {

using nlohmann::json;

std::vector<uint8_t> be64_salt(uint64_t v) {
    std::vector<uint8_t> salt(8);
    for (int i = 0; i < 8; ++i)
        salt[static_cast<size_t>(i)] = static_cast<uint8_t>(v >> (8 * (7 - i)));
    return salt;
}

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VEIL_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return std::min<unsigned>(hw, v);
    }
    return hw;
}

struct SetupFlags {
    double qa = 1.0;
    double sa = 1.0;
    uint32_t fanout = 1;
    uint32_t degree = 0;
    int64_t desired_overlap = -1;  // -1 = unset
    uint64_t seed = 0;
    uint32_t record_width = 64;

    veil::Params params() const {
        veil::Params p;
        p.qa = qa;
        p.sa = sa;
        p.fanout = fanout;
        p.degree = degree;
        if (desired_overlap >= 0)
            p.desired_overlap = static_cast<uint32_t>(desired_overlap);
        p.seed = seed;
        p.record_width = record_width;
        return p;
    }
};

void add_param_flags(CLI::App* cmd, SetupFlags& flags) {
    cmd->add_option("--qa", flags.qa, "Query amplification target (>= 1)");
    cmd->add_option("--sa", flags.sa, "Storage amplification target (>= 1)");
    cmd->add_option("--fanout", flags.fanout, "Buckets per key (>= 1)");
    cmd->add_option("--degree", flags.degree,
                    "Overlap-graph degree (0 = disjoint padding)");
    cmd->add_option("--desired-overlap", flags.desired_overlap,
                    "Fix the pairwise overlap to this value");
    cmd->add_option("--seed", flags.seed, "Deterministic build seed");
    cmd->add_option("--record-width", flags.record_width,
                    "Fixed plaintext record width in bytes");
}

json metrics_json(const veil::Metrics& m) {
    return json{{"qa_actual", m.qa_actual},
                {"sa_actual", m.sa_actual},
                {"sr", m.sr},
                {"csa", m.csa},
                {"ssa", m.ssa},
                {"dataset_records", m.dataset_records},
                {"stored_records", m.stored_records},
                {"index_entries", m.index_entries},
                {"stash_records", m.stash_records},
                {"lb", m.lb},
                {"n", m.n},
                {"lmax", m.lmax}};
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
    uint64_t keys = 0;
    uint64_t records = 0;
    double z = 0.0;
    uint64_t seed = 0;
    uint32_t value_width = 8;
    std::string out;
};

int run_gen_data(const GenDataArgs& a) {
    veil::SkewSpec spec{a.keys, a.records, a.z, a.seed, a.value_width};
    veil::Dataset ds = veil::generate(spec);
    veil::write_dataset_tsv(ds, a.out);
    json j{{"keys", a.keys},
           {"records", ds.size()},
           {"z", a.z},
           {"seed", a.seed},
           {"lmax", ds.max_key_volume()},
           {"out", a.out}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------- setup

struct SetupArgs {
    std::string dataset;
    std::string out_dir;
    std::string salt_hex;
    SetupFlags flags;
};

int run_setup(const SetupArgs& a) {
    veil::Dataset ds = veil::read_dataset_tsv(a.dataset);
    auto [bundle, client] =
        veil::setup(ds, a.flags.params(), veil::hex_decode(a.salt_hex));
    veil::store_bundle(bundle, a.out_dir);
    veil::store_client(client, a.out_dir);
    std::cout << metrics_json(veil::compute_metrics(ds, bundle, client)).dump(2)
              << "\n";
    return 0;
}

// ------------------------------------------------------- query/insert/delete

int run_query(const std::string& dir, const std::string& key) {
    veil::Engine engine(veil::load_bundle(dir), veil::load_client(dir));
    veil::QueryResult res = engine.query(key);
    for (const auto& rec : res.records)
        std::cout << rec.key << '\t' << rec.value << '\n';
    return 0;
}

int run_insert(const std::string& dir, const std::string& key,
               const std::string& value) {
    veil::Engine engine(veil::load_bundle(dir), veil::load_client(dir));
    veil::InsertOutcome outcome = engine.insert(key, value);
    veil::store_bundle(engine.bundle(), dir);
    veil::store_client(engine.client(), dir);
    json j{{"location",
            outcome.location == veil::InsertLocation::Bucket ? "bucket" : "stash"},
           {"capacity_warning", outcome.capacity_warning}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_delete(const std::string& dir, const std::string& key,
               const std::string& value) {
    veil::Engine engine(veil::load_bundle(dir), veil::load_client(dir));
    engine.remove(key, value);
    veil::store_bundle(engine.bundle(), dir);
    veil::store_client(engine.client(), dir);
    std::cout << json{{"deleted", true}}.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
    std::string dataset;  // either a TSV path...
    uint64_t keys = 0;    // ...or a generated Zipf dataset
    uint64_t records = 0;
    double z = 0.0;
    uint64_t data_seed = 0;
    std::vector<double> qa{1.0};
    std::vector<double> sa{1.0};
    std::vector<uint32_t> fanout{1};
    std::vector<uint32_t> degree{0};
    std::vector<int64_t> desired_overlap;  // empty = unset
    uint32_t seeds = 5;
    uint64_t seed_base = 1;
    uint32_t record_width = 64;
    uint32_t queries_per_run = 20;
    std::string out;
};

struct BenchCell {
    double qa, sa;
    uint32_t fanout, degree;
    std::optional<uint32_t> desired_overlap;
};

struct BenchRow {
    BenchCell cell;
    uint64_t seed = 0;
    uint32_t lb = 0, n = 0;
    double sr = 0, sa_actual = 0, qa_actual = 0;
    double setup_ms = 0, mean_query_ms = 0;
    bool failed = false;
    std::string error;
};

std::string csv_escape_double(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void write_row(std::ostream& out, const std::string& source, double z,
               uint64_t keys, uint64_t records, const BenchRow& row,
               const std::string& seed_label) {
    out << source << ',' << z << ',' << keys << ',' << records << ','
        << row.cell.qa << ',' << row.cell.sa << ',' << row.cell.fanout << ','
        << row.cell.degree << ',';
    if (row.cell.desired_overlap) out << *row.cell.desired_overlap;
    out << ',' << seed_label << ',';
    if (row.failed) {
        out << ",,,,,,error:" << row.error << '\n';
        return;
    }
    out << row.lb << ',' << row.n << ',' << csv_escape_double(row.sr) << ','
        << csv_escape_double(row.sa_actual) << ','
        << csv_escape_double(row.qa_actual) << ','
        << csv_escape_double(row.setup_ms) << ','
        << csv_escape_double(row.mean_query_ms) << '\n';
}

BenchRow run_bench_job(const veil::Dataset& ds, const BenchCell& cell,
                       uint64_t seed, uint32_t record_width,
                       uint32_t queries_per_run) {
    BenchRow row;
    row.cell = cell;
    row.seed = seed;
    try {
        veil::Params params;
        params.qa = cell.qa;
        params.sa = cell.sa;
        params.fanout = cell.fanout;
        params.degree = cell.degree;
        params.desired_overlap = cell.desired_overlap;
        params.seed = seed;
        params.record_width = record_width;

        auto t0 = std::chrono::steady_clock::now();
        auto [bundle, client] = veil::setup(ds, params, be64_salt(seed));
        auto t1 = std::chrono::steady_clock::now();
        row.setup_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        veil::Metrics m = veil::compute_metrics(ds, bundle, client);
        row.lb = m.lb;
        row.n = m.n;
        row.sr = m.sr;
        row.sa_actual = m.sa_actual;
        row.qa_actual = m.qa_actual;

        veil::Engine engine(std::move(bundle), std::move(client));
        veil::Xoshiro256pp pick(seed ^ 0xbadc0ffee0ddf00dull);
        auto q0 = std::chrono::steady_clock::now();
        for (uint32_t q = 0; q < queries_per_run; ++q) {
            std::string key =
                q % 4 == 3 ? "absent-" + std::to_string(q)
                           : ds.records[pick.below(ds.size())].key;
            (void)engine.query(key);
        }
        auto q1 = std::chrono::steady_clock::now();
        row.mean_query_ms =
            std::chrono::duration<double, std::milli>(q1 - q0).count() /
            std::max(1u, queries_per_run);
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

int run_bench(const BenchArgs& a) {
    veil::Dataset ds;
    std::string source;
    if (!a.dataset.empty()) {
        ds = veil::read_dataset_tsv(a.dataset);
        source = a.dataset;
    } else {
        if (a.keys == 0 || a.records == 0)
            throw veil::InvalidSpec(
                "bench needs --dataset or --keys/--records (with --z)");
        ds = veil::generate({a.keys, a.records, a.z, a.data_seed, 8});
        source = "zipf";
    }

    std::vector<std::optional<uint32_t>> overlaps;
    if (a.desired_overlap.empty()) {
        overlaps.push_back(std::nullopt);
    } else {
        for (int64_t o : a.desired_overlap) {
            if (o < 0) throw veil::InvalidSpec("desired overlap must be >= 0");
            overlaps.push_back(static_cast<uint32_t>(o));
        }
    }

    std::vector<BenchCell> cells;
    for (double qa : a.qa)
        for (double sa : a.sa)
            for (uint32_t f : a.fanout)
                for (uint32_t d : a.degree)
                    for (const auto& o : overlaps)
                        cells.push_back({qa, sa, f, d, o});

    struct Job {
        size_t cell;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (size_t c = 0; c < cells.size(); ++c)
        for (uint32_t s = 0; s < a.seeds; ++s)
            jobs.push_back({c, a.seed_base + s});

    std::vector<BenchRow> rows(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            rows[i] = run_bench_job(ds, cells[jobs[i].cell], jobs[i].seed,
                                    a.record_width, a.queries_per_run);
        }
    };
    unsigned pool = std::min<size_t>(worker_count(), jobs.size());
    std::vector<std::thread> threads;
    for (unsigned t = 0; t + 1 < pool; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!a.out.empty()) {
        file.open(a.out, std::ios::trunc);
        if (!file) throw veil::IoError("cannot write CSV: " + a.out);
        out = &file;
    }
    *out << "source,z,keys,records,qa,sa,fanout,degree,desired_overlap,seed,"
            "lb,n,sr,sa_actual,qa_actual,setup_ms,mean_query_ms\n";

    const uint64_t n_keys = a.dataset.empty() ? a.keys : 0;
    for (const auto& row : rows)
        write_row(*out, source, a.z, n_keys, ds.size(), row,
                  std::to_string(row.seed));

    // Aggregate mean row per cell (failed replicates excluded).
    for (size_t c = 0; c < cells.size(); ++c) {
        BenchRow agg;
        agg.cell = cells[c];
        uint32_t ok = 0;
        for (size_t i = 0; i < jobs.size(); ++i) {
            if (jobs[i].cell != c || rows[i].failed) continue;
            ++ok;
            agg.lb = rows[i].lb;
            agg.n = rows[i].n;
            agg.sr += rows[i].sr;
            agg.sa_actual += rows[i].sa_actual;
            agg.qa_actual += rows[i].qa_actual;
            agg.setup_ms += rows[i].setup_ms;
            agg.mean_query_ms += rows[i].mean_query_ms;
        }
        if (ok == 0) continue;
        agg.sr /= ok;
        agg.sa_actual /= ok;
        agg.qa_actual /= ok;
        agg.setup_ms /= ok;
        agg.mean_query_ms /= ok;
        write_row(*out, source, a.z, n_keys, ds.size(), agg, "mean");
    }
    return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string dir;
    std::string dataset;
    std::string queries;
    uint32_t vsr_trials = 1000;
    uint64_t seed = 2026;
    std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
    veil::Dataset ds = veil::read_dataset_tsv(a.dataset);
    veil::OutsourcedBundle bundle = veil::load_bundle(a.dir);
    veil::ClientState client = veil::load_client(a.dir);

    std::vector<std::string> query_keys;
    if (!a.queries.empty()) {
        std::ifstream in(a.queries);
        if (!in) throw veil::IoError("cannot open queries file: " + a.queries);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) query_keys.push_back(line);
    } else {
        for (const auto& rec : ds.records) {
            if (query_keys.empty() || query_keys.back() != rec.key)
                query_keys.push_back(rec.key);
            if (query_keys.size() >= 16) break;
        }
    }

    std::string report =
        veil::analysis_report(ds, bundle, client, query_keys, a.vsr_trials, a.seed);
    if (a.out.empty()) {
        std::cout << report;
    } else {
        std::ofstream out(a.out, std::ios::trunc);
        if (!out) throw veil::IoError("cannot write report: " + a.out);
        out << report;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"veil: volume-hiding encrypted key-value store"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "Generate a skewed TSV dataset");
    cmd_gen->add_option("--keys", gen.keys, "Number of distinct keys")->required();
    cmd_gen->add_option("--records", gen.records, "Total records")->required();
    cmd_gen->add_option("--z", gen.z, "Zipf skew exponent");
    cmd_gen->add_option("--seed", gen.seed, "Value RNG seed");
    cmd_gen->add_option("--value-width", gen.value_width, "Value bytes");
    cmd_gen->add_option("--out", gen.out, "Output TSV path")->required();

    SetupArgs setup_args;
    auto* cmd_setup = app.add_subcommand("setup", "Bucketize, pad, encrypt, outsource");
    cmd_setup->add_option("--dataset", setup_args.dataset, "Input TSV")->required();
    cmd_setup->add_option("--out", setup_args.out_dir, "Bundle directory")->required();
    cmd_setup->add_option("--salt-hex", setup_args.salt_hex,
                          "Mapper salt (hex, default empty)");
    add_param_flags(cmd_setup, setup_args.flags);

    std::string dir, key, value;
    auto* cmd_query = app.add_subcommand("query", "Fetch all records of a key");
    cmd_query->add_option("--dir", dir, "Bundle directory")->required();
    cmd_query->add_option("--key", key, "Key to query")->required();

    auto* cmd_insert = app.add_subcommand("insert", "Insert one record");
    cmd_insert->add_option("--dir", dir, "Bundle directory")->required();
    cmd_insert->add_option("--key", key, "Key")->required();
    cmd_insert->add_option("--value", value, "Value")->required();

    auto* cmd_delete = app.add_subcommand("delete", "Delete one record");
    cmd_delete->add_option("--dir", dir, "Bundle directory")->required();
    cmd_delete->add_option("--key", key, "Key")->required();
    cmd_delete->add_option("--value", value, "Value")->required();

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Parameter-sweep benchmark, CSV out");
    cmd_bench->add_option("--dataset", bench.dataset, "Input TSV (overrides --keys)");
    cmd_bench->add_option("--keys", bench.keys, "Zipf: distinct keys");
    cmd_bench->add_option("--records", bench.records, "Zipf: total records");
    cmd_bench->add_option("--z", bench.z, "Zipf: skew exponent");
    cmd_bench->add_option("--data-seed", bench.data_seed, "Zipf: value seed");
    cmd_bench->add_option("--qa", bench.qa, "QA grid")->delimiter(',');
    cmd_bench->add_option("--sa", bench.sa, "SA grid")->delimiter(',');
    cmd_bench->add_option("--fanout", bench.fanout, "Fanout grid")->delimiter(',');
    cmd_bench->add_option("--degree", bench.degree, "Degree grid")->delimiter(',');
    cmd_bench->add_option("--desired-overlap", bench.desired_overlap,
                          "Fixed-overlap grid")->delimiter(',');
    cmd_bench->add_option("--seeds", bench.seeds, "Replicates per cell");
    cmd_bench->add_option("--seed", bench.seed_base, "First replicate seed");
    cmd_bench->add_option("--record-width", bench.record_width, "Record width");
    cmd_bench->add_option("--queries", bench.queries_per_run, "Timed queries per run");
    cmd_bench->add_option("--out", bench.out, "CSV path (default stdout)");

    AnalyzeArgs an;
    auto* cmd_analyze = app.add_subcommand("analyze", "Metrics/leakage/attack report");
    cmd_analyze->add_option("--dir", an.dir, "Bundle directory")->required();
    cmd_analyze->add_option("--dataset", an.dataset, "Plaintext TSV")->required();
    cmd_analyze->add_option("--queries", an.queries, "Query-key file (one per line)");
    cmd_analyze->add_option("--vsr-trials", an.vsr_trials, "Permutation-test trials");
    cmd_analyze->add_option("--seed", an.seed, "Report RNG seed");
    cmd_analyze->add_option("--out", an.out, "Report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_gen->parsed()) return run_gen_data(gen);
        if (cmd_setup->parsed()) return run_setup(setup_args);
        if (cmd_query->parsed()) return run_query(dir, key);
        if (cmd_insert->parsed()) return run_insert(dir, key, value);
        if (cmd_delete->parsed()) return run_delete(dir, key, value);
        if (cmd_bench->parsed()) return run_bench(bench);
        if (cmd_analyze->parsed()) return run_analyze(an);
    } catch (const veil::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 3;
    } catch (const veil::InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::EmptyDataset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::FanoutExceedsBuckets& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::OverlapInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::RecordTooWide& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::NotFound& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const veil::Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
