#pragma once

#include "bron/analytics.hpp"
#include "bron/cpe.hpp"
#include "bron/error.hpp"
#include "bron/graph.hpp"
#include "bron/ingest/attack.hpp"
#include "bron/ingest/build.hpp"
#include "bron/ingest/capec.hpp"
#include "bron/ingest/cwe.hpp"
#include "bron/ingest/interchange.hpp"
#include "bron/ingest/nvd.hpp"
#include "bron/latest.hpp"
#include "bron/node_kind.hpp"
#include "bron/params.hpp"
#include "bron/query.hpp"
#include "bron/records.hpp"
#include "bron/report_io.hpp"
#include "bron/score.hpp"
#include "bron/version.hpp"
