#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

// httplib's default backlog of 5 drops bursts of connections into SYN retries.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif
#include <httplib.h>
#include <sys/socket.h>
#include <json.hpp>

#include "bron/analytics.hpp"
#include "bron/graph.hpp"
#include "bron/ingest/interchange.hpp"
#include "bron/params.hpp"
#include "bron/query.hpp"
#include "bron/report_io.hpp"

namespace bron {

using QueryParams = std::multimap<std::string, std::string>;

struct ApiResponse {
    int http_status = 200;
    Record body; // {status, data, truncated, elapsed_ms[, next_cursor]} or {status, error, ...}
};

/// Read-only JSON API over a sealed graph.
///
/// Every success body is {"status":"ok","data":...,"truncated":bool,
/// "elapsed_ms":n}; list endpoints add "next_cursor" when more items exist.
/// Errors are {"status":"error","error":{"code","message"},...} with 404 for
/// unknown nodes/products/routes and 400 for bad parameters.
///
/// List endpoints (/paths, /reachable, /search, neighbors) accept `limit`
/// and `cursor`. A cursor is the decimal offset of the next item in the
/// endpoint's deterministic order.
class ApiService {
public:
    explicit ApiService(std::shared_ptr<const BronGraph> graph) : graph_(std::move(graph)) {}

    ApiService(const ApiService&) = delete;
    ApiService& operator=(const ApiService&) = delete;
    ~ApiService() { stop(); }

    /// Swaps in a new sealed graph. Requests already running finish on the
    /// graph they started with.
    void reload(std::shared_ptr<const BronGraph> graph) {
        std::lock_guard lock(graph_mutex_);
        graph_ = std::move(graph);
    }

    std::shared_ptr<const BronGraph> graph() const {
        std::lock_guard lock(graph_mutex_);
        return graph_;
    }

    /// Answers one GET request. `path` is already percent-decoded.
    ApiResponse handle(std::string_view path, const QueryParams& params) const {
        const auto started = std::chrono::steady_clock::now();
        const auto graph = this->graph();
        ApiResponse response;
        Record data;
        bool truncated = false;
        std::optional<std::size_t> next_cursor;
        try {
            route(*graph, path, params, data, truncated, next_cursor);
            response.body["status"] = "ok";
            response.body["data"] = std::move(data);
        } catch (const RouteNotFound& e) {
            response = error_response(404, "UnknownRoute", e.what());
        } catch (const Error& e) {
            response = error_response(status_for(e.code()), std::string(to_string(e.code())), e.what());
        } catch (const std::exception& e) {
            response = error_response(500, "Internal", e.what());
        }
        response.body["truncated"] = truncated;
        if (next_cursor) response.body["next_cursor"] = std::to_string(*next_cursor);
        const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - started;
        response.body["elapsed_ms"] = elapsed.count();
        return response;
    }

    /// Binds the listening socket. Port 0 picks a free port; the bound port
    /// is returned.
    int bind(const std::string& host, int port) {
        server_ = std::make_unique<httplib::Server>();
        // The library default adds SO_REUSEPORT, which would let a second
        // server share a port that is already in use.
        server_->set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        server_->Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
            auto response = handle(req.path, req.params);
            res.status = response.http_status;
            res.set_content(detail::dump_line(response.body), "application/json; charset=utf-8");
        });
        const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
        if (bound < 0) {
            server_.reset();
            throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
        }
        return bound;
    }

    /// Serves on the calling thread until stop().
    void run() {
        if (!server_) throw Error(ErrorCode::InvalidArgument, "bind() must be called before run()");
        server_->listen_after_bind();
    }

    /// Serves on a background thread.
    void start() {
        if (!server_) throw Error(ErrorCode::InvalidArgument, "bind() must be called before start()");
        worker_ = std::thread([this] { server_->listen_after_bind(); });
        server_->wait_until_ready();
    }

    /// Stops accepting connections and waits for in-flight requests.
    void stop() {
        if (server_) server_->stop();
        if (worker_.joinable()) worker_.join();
    }

private:
    struct RouteNotFound : std::runtime_error {
        using std::runtime_error::runtime_error;
    };

    static int status_for(ErrorCode code) {
        switch (code) {
            case ErrorCode::UnknownNode:
            case ErrorCode::UnknownProduct: return 404;
            case ErrorCode::InvalidArgument:
            case ErrorCode::WrongKind:
            case ErrorCode::LimitZero:
            case ErrorCode::NoEntries: return 400;
            default: return 500;
        }
    }

    static ApiResponse error_response(int status, const std::string& code, const std::string& message) {
        ApiResponse r;
        r.http_status = status;
        r.body["status"] = "error";
        r.body["error"] = {{"code", code}, {"message", message}};
        return r;
    }

    static const std::string* param(const QueryParams& params, const std::string& key) {
        auto it = params.find(key);
        return it == params.end() ? nullptr : &it->second;
    }

    static const std::string& required(const QueryParams& params, const std::string& key) {
        const auto* v = param(params, key);
        if (v == nullptr || v->empty()) throw Error(ErrorCode::InvalidArgument, "missing parameter '" + key + "'");
        return *v;
    }

    static QueryFilter filter_from(const QueryParams& params) {
        QueryFilter f;
        if (const auto* v = param(params, "years")) f.years = parse_year_range(*v);
        if (const auto* v = param(params, "year")) f.years = parse_year_range(*v);
        if (const auto* v = param(params, "latest")) f.latest_versions_only = parse_flag(*v, "latest");
        if (const auto* v = param(params, "vendor")) f.vendor = *v;
        if (const auto* v = param(params, "product")) f.product = *v;
        if (const auto* v = param(params, "require")) f.kinds_required = parse_kind_list(*v);
        return f;
    }

    static std::size_t cursor_from(const QueryParams& params) {
        const auto* v = param(params, "cursor");
        if (v == nullptr) return 0;
        const int n = parse_int(*v, "cursor");
        if (n < 0) throw Error(ErrorCode::InvalidArgument, "cursor must not be negative");
        return static_cast<std::size_t>(n);
    }

    // Slices a complete list by cursor/limit.
    template <typename T, typename ToJson>
    static Record page(const std::vector<T>& items, const QueryParams& params, bool& truncated,
                       std::optional<std::size_t>& next_cursor, ToJson&& to_json) {
        const auto cursor = cursor_from(params);
        const auto* lim = param(params, "limit");
        const std::size_t limit = lim ? parse_limit(*lim) : items.size();
        Record out = Record::array();
        for (std::size_t i = cursor; i < items.size() && i - cursor < limit; ++i) out.push_back(to_json(items[i]));
        if (cursor + limit < items.size()) {
            truncated = true;
            next_cursor = cursor + limit;
        }
        return out;
    }

    static Record node_summary(const ThreatNode& node) {
        return {{"id", node.id}, {"kind", std::string(to_string(node.kind))}, {"name", node.name}};
    }

    void route(const BronGraph& graph, std::string_view path, const QueryParams& params, Record& data, bool& truncated,
               std::optional<std::size_t>& next_cursor) const {
        const auto identity = [](const std::string& s) { return Record(s); };
        constexpr std::string_view nodes_prefix = "/nodes/";
        constexpr std::string_view neighbors_suffix = "/neighbors";

        if (path.substr(0, nodes_prefix.size()) == nodes_prefix && path.size() > nodes_prefix.size()) {
            std::string rest(path.substr(nodes_prefix.size()));
            if (rest.size() > neighbors_suffix.size() && rest.ends_with(neighbors_suffix)) {
                auto id = rest.substr(0, rest.size() - neighbors_suffix.size());
                if (graph.contains(id) || !graph.contains(rest)) {
                    const auto* dir = param(params, "direction");
                    data = page(graph.neighbors(id, parse_direction(dir ? *dir : "both")), params, truncated, next_cursor,
                                identity);
                    return;
                }
            }
            data = node_to_json(graph.node(rest));
            return;
        }
        if (path == "/paths") {
            const auto& from = required(params, "from");
            const auto to = node_kind_from_string(required(params, "to"));
            const auto cursor = cursor_from(params);
            const auto* lim = param(params, "limit");
            const std::size_t limit = lim ? parse_limit(*lim) : kDefaultPathLimit;
            const auto result = trace_paths(graph, from, to, filter_from(params), cursor + limit);
            data = Record::array();
            for (std::size_t i = cursor; i < result.paths.size(); ++i) data.push_back(result.paths[i].nodes);
            truncated = result.truncated;
            if (truncated) next_cursor = cursor + limit;
            return;
        }
        if (path == "/reachable") {
            const auto& from = required(params, "from");
            const auto to = node_kind_from_string(required(params, "to"));
            data = page(reachable_set(graph, from, to, filter_from(params)), params, truncated, next_cursor, identity);
            return;
        }
        if (path == "/search") {
            const auto needle = ascii_lower(required(params, "q"));
            std::vector<const ThreatNode*> hits;
            graph.for_each_node([&](const ThreatNode& node) {
                if (ascii_lower(node.id).find(needle) != std::string::npos ||
                    ascii_lower(node.name).find(needle) != std::string::npos) {
                    hits.push_back(&node);
                }
            });
            data = page(hits, params, truncated, next_cursor, [](const ThreatNode* n) { return node_summary(*n); });
            return;
        }
        if (path == "/reports/inventory") {
            data = inventory_records(inventory_report(graph, filter_from(params)));
        } else if (path == "/reports/trends") {
            const auto* mode = param(params, "mode");
            data = trend_records(yearly_connectivity(graph, filter_from(params), parse_count_mode(mode ? *mode : "paths")));
        } else if (path == "/reports/severity") {
            data = severity_records(severity_ledger(graph, filter_from(params)));
        } else if (path == "/reports/vendor-tactics") {
            const auto* mode = param(params, "mode");
            data = vendor_tactic_records(vendor_tactic_matrix(graph, split_list(required(params, "vendors")),
                                                              parse_matrix_mode(mode ? *mode : "products"),
                                                              filter_from(params)));
        } else if (path == "/reports/vendor-severity") {
            const auto* scoring = param(params, "scoring");
            const auto* tactic = param(params, "tactic");
            data = vendor_severity_records(vendor_severity_distribution(
                graph, split_list(required(params, "vendors")), parse_scoring(scoring ? *scoring : "max"),
                tactic ? std::optional<std::string>(*tactic) : std::nullopt, filter_from(params)));
        } else if (path == "/reports/product-versions") {
            // vendor/product here name the product, not a configuration filter.
            QueryParams rest = params;
            rest.erase("vendor");
            rest.erase("product");
            data = product_version_records(
                product_version_report(graph, required(params, "vendor"), required(params, "product"), filter_from(rest)));
        } else {
            throw RouteNotFound("no route for '" + std::string(path) + "'");
        }
    }

    mutable std::mutex graph_mutex_;
    std::shared_ptr<const BronGraph> graph_;
    std::unique_ptr<httplib::Server> server_;
    std::thread worker_;
};

} // namespace bron
