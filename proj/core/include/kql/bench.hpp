#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kql/engine.hpp"
#include "kql/registry.hpp"

namespace kql {

// Synthetic email corpus with the message-table schema. Generation is a pure
// function of the spec: the same spec yields byte-identical files.
struct CorpusSpec {
  std::int64_t n_users = 2;     // >= 2
  std::int64_t n_messages = 1;  // >= 1
  Timestamp start;              // start < end; sent_time uniform in [start, end)
  Timestamp end;
  std::uint64_t seed = 0;
  double folder_mix = 0.5;  // fraction of messages in "sent" vs "sent_items"
};

// The 11-column physical schema of email_message_table.
TableSchema email_schema();

void generate_corpus(const CorpusSpec& spec, std::ostream& out);
void generate_corpus_file(const CorpusSpec& spec, const std::string& path);

// A client issues the workload's queries in one mode and accounts per-call
// wall time. The kql client times parse + rewrite + execute (+ result file
// write); the direct client prepares the rewritten SQL untimed and times
// only execute (+ write) of the pre-rendered text.
struct CallStats {
  std::int64_t n_calls = 0;
  std::int64_t total_ns = 0;
  std::int64_t min_ns = 0;
  std::int64_t max_ns = 0;
  std::int64_t rewrite_total_ns = 0;  // parse+rewrite share; kql mode only

  void record(std::int64_t ns, std::int64_t rewrite_ns);
};

class QueryClient {
 public:
  virtual ~QueryClient() = default;
  virtual ResultSet run(const std::string& kql_text) = 0;

  const CallStats& stats() const { return stats_; }

 protected:
  CallStats stats_;
};

class KqlClient : public QueryClient {
 public:
  KqlClient(const Registry& registry, const Database& db,
            std::string result_path);
  ResultSet run(const std::string& kql_text) override;

 private:
  const Registry& registry_;
  const Database& db_;
  std::string result_path_;
};

class DirectClient : public QueryClient {
 public:
  DirectClient(const Registry& registry, const Database& db,
               std::string result_path);
  ResultSet run(const std::string& kql_text) override;

 private:
  const Registry& registry_;
  const Database& db_;
  std::string result_path_;
};

// The two query shapes the workload issues.
std::string senders_query_kql();
std::string per_sender_query_kql(const std::string& sender,
                                 const std::string& window_start,
                                 const std::string& window_end);

struct GraphParams {
  std::int64_t min_messages = 10;
  std::optional<std::int64_t> initial_senders;  // nullopt = all senders
};

// Directed message-count graph: edge s→r iff at least min_messages messages
// were sent s→r within the window.
struct EmailGraph {
  std::vector<std::string> senders;  // initial senders used, first-occurrence order
  std::map<std::pair<std::string, std::string>, std::int64_t> edges;
  std::vector<std::string> nodes;  // edge endpoints, first-occurrence order
};

EmailGraph build_email_graph(QueryClient& client, const GraphParams& params,
                             const std::string& window_start,
                             const std::string& window_end);

// Girvan–Newman on the unweighted undirected projection: repeatedly removes
// the edge of maximal betweenness (ties: lexicographically smallest endpoint
// pair) until the component count reaches target_components or no edges
// remain. Communities come back as sorted address lists, ordered by first
// member.
std::vector<std::vector<std::string>> girvan_newman(const EmailGraph& graph,
                                                    int target_components);

// Order-insensitive FNV-1a digest of a community partition.
std::string communities_digest(
    const std::vector<std::vector<std::string>>& communities);

enum class BenchMode { Kql, Direct };

struct BenchParams {
  std::int64_t min_messages = 10;
  std::optional<std::int64_t> initial_senders;  // nullopt = all
  int target_communities = 2;
};

struct BenchReport {
  std::string mode;
  std::int64_t n_calls = 0;
  std::int64_t total_ns = 0;
  double per_call_mean_ns = 0;
  std::int64_t per_call_min_ns = 0;
  std::int64_t per_call_max_ns = 0;
  double rewrite_per_call_mean_ns = 0;  // kql mode only
  std::string result_digest;
  std::int64_t n_communities = 0;
};

// Generates the corpus under workdir, loads it, runs the community-detection
// workload in the given mode, and reports timings plus the community digest.
BenchReport run_benchmark(const CorpusSpec& spec, const BenchParams& params,
                          BenchMode mode, const Registry& registry,
                          const std::string& workdir);

// JSON report document; includes overhead_ratio and digests_match when both
// modes are present.
std::string render_bench_reports(const std::vector<BenchReport>& reports);

}  // namespace kql
