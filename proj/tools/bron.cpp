// bron: build layered threat graphs, run reports and queries, serve the API.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "bron/bron.hpp"
#include "bron/service.hpp"

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kInput = 2, kTarget = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(const bron::Error& e) {
    switch (e.code()) {
        case bron::ErrorCode::UnknownNode:
        case bron::ErrorCode::UnknownProduct:
        case bron::ErrorCode::WrongKind: return kTarget;
        case bron::ErrorCode::BindFailure: return kInternal;
        default: return kInput;
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open");
    return in;
}

bron::BronGraph load_graph(const std::string& path) {
    if (path.empty()) throw InputError("no graph given (use --graph or set BRON_GRAPH)");
    auto in = open_input(path);
    try {
        return bron::read_interchange(in);
    } catch (const bron::Error& e) {
        throw InputError(path + ": " + e.what());
    }
}

enum class Format { Table, Jsonl };

void emit(const bron::Records& records, Format format) {
    if (format == Format::Jsonl) {
        bron::write_records(records, std::cout);
    } else {
        bron::print_table(records, std::cout);
    }
}

struct FilterFlags {
    bool latest_only = false;
    std::string years;
    std::string vendor;
    std::string product;
    std::string require;

    void add_to(CLI::App* app, bool with_vendor_product = true) {
        app->add_flag("--latest-only", latest_only, "Drop superseded product versions");
        app->add_option("--years", years, "CVE year or inclusive range A:B");
        if (with_vendor_product) {
            app->add_option("--vendor", vendor, "Restrict configurations to this vendor");
            app->add_option("--product", product, "Restrict configurations to this product");
        }
        app->add_option("--require", require, "Comma-separated kinds every path must visit");
    }

    bron::QueryFilter filter() const {
        bron::QueryFilter f;
        f.latest_versions_only = latest_only;
        if (!years.empty()) f.years = bron::parse_year_range(years);
        if (!vendor.empty()) f.vendor = vendor;
        if (!product.empty()) f.product = product;
        if (!require.empty()) f.kinds_required = bron::parse_kind_list(require);
        return f;
    }
};

// ------------------------------------------------------------------- build

struct BuildFlags {
    std::vector<std::string> attack;
    std::vector<std::string> capec;
    std::vector<std::string> cwe;
    std::vector<std::string> cve;
    std::string out;
};

template <typename Loader>
void load_all(const std::vector<std::string>& paths, Loader loader, std::vector<bron::SourceRecord>& records) {
    for (const auto& path : paths) {
        auto in = open_input(path);
        try {
            auto loaded = loader(in);
            records.insert(records.end(), std::make_move_iterator(loaded.begin()), std::make_move_iterator(loaded.end()));
        } catch (const bron::Error& e) {
            throw InputError(path + ": " + e.what());
        }
    }
}

int run_build(const BuildFlags& flags, Format format) {
    std::vector<bron::SourceRecord> records;
    load_all(flags.attack, bron::ingest::load_attack, records);
    load_all(flags.capec, bron::ingest::load_capec, records);
    load_all(flags.cwe, bron::ingest::load_cwe, records);
    load_all(flags.cve, bron::ingest::load_cve_feed, records);
    bron::BuildResult built;
    try {
        built = bron::build_graph(std::span<const bron::SourceRecord>(records));
    } catch (const bron::Error& e) {
        throw InputError(e.what());
    }

    // Write beside the target and rename, so a failure never leaves a partial file.
    const std::string tmp = flags.out + ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError(flags.out + ": cannot write");
        bron::write_interchange(built.graph, out);
        if (!out.flush()) throw InputError(flags.out + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, flags.out, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw InputError(flags.out + ": cannot write");
    }

    const auto& report = built.report;
    if (format == Format::Jsonl) {
        bron::write_records({bron::build_report_record(report)}, std::cout);
        return kOk;
    }
    std::cout << report.node_total() << " nodes, " << report.edge_total() << " edges\n";
    bron::TextTable nodes({"kind", "nodes"});
    for (auto kind : bron::kAllKinds) {
        nodes.add({std::string(bron::to_string(kind)), std::to_string(report.node_counts[bron::kind_index(kind)])});
    }
    nodes.print(std::cout);
    std::cout << "dangling references: " << report.dangling_refs.size() << "\n";
    for (const auto& d : report.dangling_refs) std::cout << "  " << d.from_id << " -> " << d.missing_id << "\n";
    std::cout << "malformed references: " << report.malformed_refs.size() << "\n";
    for (const auto& d : report.malformed_refs) std::cout << "  " << d.from_id << " -> " << d.missing_id << "\n";
    std::cout << "duplicate records: " << report.duplicate_records << ", duplicate edges: " << report.duplicate_edges
              << "\n";
    return kOk;
}

// ------------------------------------------------------------------ report

struct ReportFlags {
    std::string kind;
    std::string graph;
    FilterFlags filter;
    std::string vendors;
    std::string mode;
    std::string scoring = "max";
    std::string tactic;
    std::string node_kind;
    double percentile = bron::kDefaultSuperEntryPercentile;
};

int run_report(const ReportFlags& flags, Format format) {
    const auto graph = load_graph(flags.graph);
    const auto require_vendors = [&] {
        auto vendors = bron::split_list(flags.vendors);
        if (vendors.empty()) throw InputError("--vendors is required for " + flags.kind);
        return vendors;
    };
    bron::Records records;
    if (flags.kind == "inventory") {
        records = bron::inventory_records(bron::inventory_report(graph, flags.filter.filter()));
    } else if (flags.kind == "trends") {
        const auto mode = bron::parse_count_mode(flags.mode.empty() ? "paths" : flags.mode);
        records = bron::trend_records(bron::yearly_connectivity(graph, flags.filter.filter(), mode));
    } else if (flags.kind == "severity") {
        records = bron::severity_records(bron::severity_ledger(graph, flags.filter.filter()));
    } else if (flags.kind == "vendor-tactics") {
        const auto mode = bron::parse_matrix_mode(flags.mode.empty() ? "products" : flags.mode);
        records = bron::vendor_tactic_records(bron::vendor_tactic_matrix(graph, require_vendors(), mode, flags.filter.filter()));
    } else if (flags.kind == "vendor-severity") {
        std::optional<std::string> tactic;
        if (!flags.tactic.empty()) tactic = flags.tactic;
        records = bron::vendor_severity_records(bron::vendor_severity_distribution(
            graph, require_vendors(), bron::parse_scoring(flags.scoring), tactic, flags.filter.filter()));
    } else if (flags.kind == "product-versions") {
        if (flags.filter.vendor.empty() || flags.filter.product.empty()) {
            throw InputError("--vendor and --product are required for product-versions");
        }
        auto filter = flags.filter.filter();
        filter.vendor.reset();
        filter.product.reset();
        records = bron::product_version_records(
            bron::product_version_report(graph, flags.filter.vendor, flags.filter.product, filter));
    } else if (flags.kind == "super-entries") {
        const auto kind = bron::node_kind_from_string(flags.node_kind.empty() ? "vulnerability" : flags.node_kind);
        const auto view = bron::filtered_view(graph, flags.filter.filter());
        for (const auto& id : bron::super_entries(view, kind, flags.percentile)) {
            bron::Record r;
            r["t"] = "super_entry";
            r["id"] = id;
            r["kind"] = std::string(bron::to_string(kind));
            r["degree"] = view.degree(id);
            records.push_back(std::move(r));
        }
    } else if (flags.kind == "floaters") {
        const auto view = bron::filtered_view(graph, flags.filter.filter());
        const auto kinds = flags.node_kind.empty() ? std::vector<bron::NodeKind>(bron::kAllKinds.begin(), bron::kAllKinds.end())
                                                   : std::vector<bron::NodeKind>{bron::node_kind_from_string(flags.node_kind)};
        for (auto kind : kinds) {
            for (const auto& id : bron::partition_floaters(view, kind).floaters) {
                bron::Record r;
                r["t"] = "floater";
                r["id"] = id;
                r["kind"] = std::string(bron::to_string(kind));
                records.push_back(std::move(r));
            }
        }
    }
    emit(records, format);
    return kOk;
}

// ------------------------------------------------------------------- query

struct QueryFlags {
    std::string graph;
    FilterFlags filter;
    std::string from;
    std::string to_kind;
    std::string from_kind;
    std::size_t limit = bron::kDefaultPathLimit;
    std::string mode = "paths";
    std::vector<std::string> canned_args;
    std::string version;
};

void print_ids(const std::vector<std::string>& ids, const std::string& tag, Format format) {
    if (format == Format::Jsonl) {
        for (const auto& id : ids) bron::write_records({bron::Record{{"t", tag}, {"id", id}}}, std::cout);
    } else {
        for (const auto& id : ids) std::cout << id << "\n";
    }
}

int run_paths(const QueryFlags& flags, Format format) {
    const auto graph = load_graph(flags.graph);
    if (flags.limit == 0) throw bron::Error(bron::ErrorCode::LimitZero, "limit must be positive");
    const auto result =
        bron::trace_paths(graph, flags.from, bron::node_kind_from_string(flags.to_kind), flags.filter.filter(), flags.limit);
    for (const auto& path : result.paths) {
        if (format == Format::Jsonl) {
            bron::write_records({bron::path_record(path)}, std::cout);
        } else {
            std::string line;
            for (const auto& id : path.nodes) line += (line.empty() ? "" : " -> ") + id;
            std::cout << line << "\n";
        }
    }
    if (result.truncated) {
        std::cerr << "truncated after " << result.paths.size() << " paths\n";
        if (format == Format::Jsonl) bron::write_records({bron::Record{{"t", "truncated"}, {"limit", flags.limit}}}, std::cout);
    }
    if (format == Format::Table) std::cout << result.paths.size() << " paths\n";
    return kOk;
}

int run_reachable(const QueryFlags& flags, Format format) {
    const auto graph = load_graph(flags.graph);
    print_ids(bron::reachable_set(graph, flags.from, bron::node_kind_from_string(flags.to_kind), flags.filter.filter()),
              "reachable", format);
    return kOk;
}

int run_count(const QueryFlags& flags, Format format) {
    const auto graph = load_graph(flags.graph);
    const auto from = bron::node_kind_from_string(flags.from_kind);
    const auto to = bron::node_kind_from_string(flags.to_kind);
    const auto n = bron::count_paths(graph, from, to, flags.filter.filter(), bron::parse_count_mode(flags.mode));
    if (format == Format::Jsonl) {
        bron::write_records({bron::Record{{"t", "count"},
                                          {"from", std::string(bron::to_string(from))},
                                          {"to", std::string(bron::to_string(to))},
                                          {"mode", flags.mode},
                                          {"count", n}}},
                            std::cout);
    } else {
        std::cout << n << "\n";
    }
    return kOk;
}

int run_canned(const std::string& name, const QueryFlags& flags, Format format) {
    const auto graph = load_graph(flags.graph);
    const auto& args = flags.canned_args;
    const auto filter = flags.filter.filter();
    if (name == "configs-for-tactic") {
        print_ids(bron::configs_for_tactic(graph, args.at(0), filter), "configuration", format);
    } else if (name == "techniques-for-vulnerability") {
        print_ids(bron::techniques_for_vulnerability(graph, args.at(0), filter), "technique", format);
    } else {
        std::optional<std::string> version;
        if (!flags.version.empty()) version = flags.version;
        const auto found = bron::tactics_and_patterns_for_product(graph, args.at(0), args.at(1), version, filter);
        bron::Records records;
        for (const auto& id : found.tactics) records.push_back({{"t", "tactic"}, {"kind", "Tactic"}, {"id", id}});
        for (const auto& id : found.patterns) records.push_back({{"t", "attack_pattern"}, {"kind", "AttackPattern"}, {"id", id}});
        emit(records, format);
    }
    return kOk;
}

// ------------------------------------------------------------------- serve

int run_serve(const std::string& graph_path, const std::string& host, int port) {
    auto graph = std::make_shared<const bron::BronGraph>(load_graph(graph_path));

    // Signals are taken synchronously by one thread: INT/TERM stop the
    // server, HUP reloads the graph file.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGHUP);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    bron::ApiService service(graph);
    const int bound = service.bind(host, port);
    std::cerr << "listening on " << host << ":" << bound << std::endl;

    std::thread signal_thread([&] {
        for (;;) {
            int sig = 0;
            if (sigwait(&signals, &sig) != 0) continue;
            if (sig == SIGHUP) {
                try {
                    service.reload(std::make_shared<const bron::BronGraph>(load_graph(graph_path)));
                    std::cerr << "reloaded " << graph_path << std::endl;
                } catch (const std::exception& e) {
                    std::cerr << "reload failed, keeping current graph: " << e.what() << std::endl;
                }
                continue;
            }
            service.stop();
            return;
        }
    });
    service.run();
    if (signal_thread.joinable()) {
        pthread_kill(signal_thread.native_handle(), SIGTERM);
        signal_thread.join();
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered threat-knowledge graph builder and query tool"};
    app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags win)");
    app.require_subcommand(1);
    app.fallthrough(); // parent flags may follow a subcommand
    std::string format_name = "table";
    app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"table", "jsonl"}));

    BuildFlags build_flags;
    auto* build = app.add_subcommand("build", "Build a graph from source files");
    build->add_option("--attack", build_flags.attack, "ATT&CK STIX bundle (repeatable)");
    build->add_option("--capec", build_flags.capec, "CAPEC XML catalog (repeatable)");
    build->add_option("--cwe", build_flags.cwe, "CWE XML catalog (repeatable)");
    build->add_option("--cve", build_flags.cve, "NVD CVE JSON feed (repeatable)");
    build->add_option("--out", build_flags.out, "Interchange file to write")->required();

    ReportFlags report_flags;
    auto* report = app.add_subcommand("report", "Run an analytics report");
    report->add_option("kind", report_flags.kind, "Report kind")
        ->required()
        ->check(CLI::IsMember({"inventory", "trends", "severity", "vendor-tactics", "vendor-severity", "product-versions",
                               "super-entries", "floaters"}));
    report->add_option("--graph", report_flags.graph, "Interchange graph file")->envname("BRON_GRAPH");
    report_flags.filter.add_to(report);
    report->add_option("--vendors", report_flags.vendors, "Comma-separated vendors");
    report->add_option("--mode", report_flags.mode, "trends: paths|pairs; vendor-tactics: products|versions");
    report->add_option("--scoring", report_flags.scoring, "vendor-severity: max|all");
    report->add_option("--tactic", report_flags.tactic, "vendor-severity: only products reachable from this tactic");
    report->add_option("--node-kind", report_flags.node_kind, "super-entries/floaters: node kind");
    report->add_option("--percentile", report_flags.percentile, "super-entries: degree percentile");

    QueryFlags query_flags;
    auto* query = app.add_subcommand("query", "Trace paths and run canned queries");
    query->require_subcommand(1);
    query->add_option("--graph", query_flags.graph, "Interchange graph file")->envname("BRON_GRAPH");
    query_flags.filter.add_to(query);

    auto* paths = query->add_subcommand("paths", "List layered paths from a node to a kind");
    paths->add_option("--from", query_flags.from, "Start node id")->required();
    paths->add_option("--to-kind", query_flags.to_kind, "Target kind")->required();
    paths->add_option("--limit", query_flags.limit, "Maximum number of paths");

    auto* reachable = query->add_subcommand("reachable", "List distinct endpoints of a kind");
    reachable->add_option("--from", query_flags.from, "Start node id")->required();
    reachable->add_option("--to-kind", query_flags.to_kind, "Target kind")->required();

    auto* count = query->add_subcommand("count", "Count paths between two kinds");
    count->add_option("--from-kind", query_flags.from_kind, "Start kind")->required();
    count->add_option("--to-kind", query_flags.to_kind, "Target kind")->required();
    count->add_option("--mode", query_flags.mode, "paths|pairs");

    auto* canned = query->add_subcommand("canned", "Predefined lookups");
    canned->require_subcommand(1);
    auto* configs_cmd = canned->add_subcommand("configs-for-tactic", "Configurations reachable from a tactic");
    configs_cmd->add_option("tactic", query_flags.canned_args, "Tactic id")->required()->expected(1);
    auto* techniques_cmd = canned->add_subcommand("techniques-for-vulnerability", "Techniques reachable from a CVE");
    techniques_cmd->add_option("cve", query_flags.canned_args, "CVE id")->required()->expected(1);
    auto* product_cmd = canned->add_subcommand("tactics-for-product", "Tactics and attack patterns for a product");
    product_cmd->add_option("vendor_product", query_flags.canned_args, "Vendor and product")->required()->expected(2);
    product_cmd->add_option("--version", query_flags.version, "Only this product version");

    std::string serve_graph;
    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the read-only HTTP API");
    serve->add_option("--graph", serve_graph, "Interchange graph file")->envname("BRON_GRAPH");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    const Format format = format_name == "jsonl" ? Format::Jsonl : Format::Table;
    try {
        if (build->parsed()) return run_build(build_flags, format);
        if (report->parsed()) return run_report(report_flags, format);
        if (paths->parsed()) return run_paths(query_flags, format);
        if (reachable->parsed()) return run_reachable(query_flags, format);
        if (count->parsed()) return run_count(query_flags, format);
        if (configs_cmd->parsed()) return run_canned("configs-for-tactic", query_flags, format);
        if (techniques_cmd->parsed()) return run_canned("techniques-for-vulnerability", query_flags, format);
        if (product_cmd->parsed()) return run_canned("tactics-for-product", query_flags, format);
        if (serve->parsed()) return run_serve(serve_graph, host, port);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const bron::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
