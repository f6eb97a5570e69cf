#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bron/ingest/attack.hpp"
#include "bron/ingest/build.hpp"
#include "bron/ingest/capec.hpp"
#include "bron/ingest/cwe.hpp"
#include "bron/ingest/interchange.hpp"
#include "bron/ingest/nvd.hpp"

#ifndef BRON_TEST_DATA_DIR
#error "BRON_TEST_DATA_DIR must point at tests/"
#endif

namespace fixtures {

inline std::string path(const std::string& relative) { return std::string(BRON_TEST_DATA_DIR) + "/" + relative; }

inline std::string read_file(const std::string& relative) {
    std::ifstream in(path(relative), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + relative);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::ifstream open(const std::string& relative) {
    std::ifstream in(path(relative), std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + relative);
    return in;
}

/// Records of the mini-bron source files, in file order.
inline std::vector<bron::SourceRecord> mini_records() {
    std::vector<bron::SourceRecord> all;
    const auto add = [&](std::vector<bron::SourceRecord> more) { all.insert(all.end(), more.begin(), more.end()); };
    auto attack = open("fixtures/mini-bron/attack.json");
    add(bron::ingest::load_attack(attack));
    auto capec = open("fixtures/mini-bron/capec.xml");
    add(bron::ingest::load_capec(capec));
    auto cwe = open("fixtures/mini-bron/cwe.xml");
    add(bron::ingest::load_cwe(cwe));
    auto cve = open("fixtures/mini-bron/nvdcve.json");
    add(bron::ingest::load_cve_feed(cve));
    return all;
}

inline bron::BuildResult mini_build() {
    const auto records = mini_records();
    return bron::build_graph(std::span<const bron::SourceRecord>(records));
}

inline const bron::BronGraph& mini() {
    static const bron::BronGraph graph = mini_build().graph;
    return graph;
}

inline const char* kChrome120 = "cpe:2.3:a:google:chrome:10.0.648.120:*:*:*:*:*:*:*";
inline const char* kChrome126 = "cpe:2.3:a:google:chrome:10.0.648.126:*:*:*:*:*:*:*";

} // namespace fixtures
