#include "kql/bench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kql/error.hpp"
#include "kql/kql_parser.hpp"

namespace kql {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::int64_t ns_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(b - a).count();
}

void check_spec(const CorpusSpec& spec) {
  if (spec.n_users < 2) throw Error(Errc::Spec, "n_users must be >= 2");
  if (spec.n_messages < 1) throw Error(Errc::Spec, "n_messages must be >= 1");
  if (spec.start.utc_seconds >= spec.end.utc_seconds) {
    throw Error(Errc::Spec, "start must precede end");
  }
  if (spec.folder_mix < 0.0 || spec.folder_mix > 1.0) {
    throw Error(Errc::Spec, "folder_mix must lie in [0, 1]");
  }
}

std::string user_address(std::int64_t i) {
  return "user" + std::to_string(i) + "@corpus.test";
}

}  // namespace

TableSchema email_schema() {
  TableSchema schema;
  schema.columns = {
      {"message_id", ValueType::Integer},
      {"sent_time", ValueType::Timestamp},
      {"recipient_address", ValueType::String},
      {"message_folder", ValueType::String},
      {"received_time", ValueType::Timestamp},
      {"message_body", ValueType::String},
      {"email_attachment", ValueType::String},
      {"sender_address", ValueType::String},
      {"recipient_count", ValueType::Integer},
      {"message_mailbox", ValueType::String},
      {"message_subject", ValueType::String},
  };
  return schema;
}

void generate_corpus(const CorpusSpec& spec, std::ostream& out) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  // Explicit modulo draws keep the byte stream independent of the standard
  // library's distribution implementations.
  const std::uint64_t range =
      static_cast<std::uint64_t>(spec.end.utc_seconds - spec.start.utc_seconds);
  const auto mix_cut = static_cast<std::uint64_t>(spec.folder_mix * 1000000.0);

  for (std::int64_t i = 1; i <= spec.n_messages; ++i) {
    const auto sender = static_cast<std::int64_t>(
        rng() % static_cast<std::uint64_t>(spec.n_users));
    const auto hop = static_cast<std::int64_t>(
        rng() % static_cast<std::uint64_t>(spec.n_users - 1));
    const std::int64_t recipient = (sender + 1 + hop) % spec.n_users;
    const std::int64_t sent =
        spec.start.utc_seconds + static_cast<std::int64_t>(rng() % range);
    const std::int64_t received = sent + static_cast<std::int64_t>(rng() % 3600);
    const bool in_sent = (rng() % 1000000) < mix_cut;

    json row = json::object();
    row["message_id"] = i;
    row["sent_time"] = format_timestamp(sent, 0);
    row["recipient_address"] = user_address(recipient);
    row["message_folder"] = in_sent ? "sent" : "sent_items";
    row["received_time"] = format_timestamp(received, 0);
    row["message_body"] = "synthetic message body " + std::to_string(i);
    row["email_attachment"] =
        i % 7 == 0 ? "attachment_" + std::to_string(i) + ".pdf" : "";
    row["sender_address"] = user_address(sender);
    row["recipient_count"] = 1;
    row["message_mailbox"] = "user" + std::to_string(sender);
    row["message_subject"] = "subject " + std::to_string(i);
    out << row.dump() << "\n";
  }
}

void generate_corpus_file(const CorpusSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write corpus file " + path);
  generate_corpus(spec, out);
}

void CallStats::record(std::int64_t ns, std::int64_t rewrite_ns) {
  if (n_calls == 0) {
    min_ns = max_ns = ns;
  } else {
    min_ns = std::min(min_ns, ns);
    max_ns = std::max(max_ns, ns);
  }
  ++n_calls;
  total_ns += ns;
  rewrite_total_ns += rewrite_ns;
}

namespace {

void write_result_file(const std::string& path, const ResultSet& rs) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write result file " + path);
  write_jsonl(out, rs);
}

}  // namespace

KqlClient::KqlClient(const Registry& registry, const Database& db,
                     std::string result_path)
    : registry_(registry), db_(db), result_path_(std::move(result_path)) {}

ResultSet KqlClient::run(const std::string& kql_text) {
  const auto t0 = Clock::now();
  Statement stmt = parse_kql(kql_text);
  SqlQuery sql = rewrite(stmt, registry_);
  const auto t1 = Clock::now();
  ResultSet rs = execute(sql, db_);
  write_result_file(result_path_, rs);
  const auto t2 = Clock::now();
  stats_.record(ns_between(t0, t2), ns_between(t0, t1));
  return rs;
}

DirectClient::DirectClient(const Registry& registry, const Database& db,
                           std::string result_path)
    : registry_(registry), db_(db), result_path_(std::move(result_path)) {}

ResultSet DirectClient::run(const std::string& kql_text) {
  // Preparation happens off the clock: this models queries that shipped
  // pre-rewritten inside the algorithm.
  const std::string sql_text = render_sql(rewrite(parse_kql(kql_text), registry_));
  Statement plain = parse_kql(sql_text);
  const auto t0 = Clock::now();
  ResultSet rs = execute(plain, db_);
  write_result_file(result_path_, rs);
  const auto t1 = Clock::now();
  stats_.record(ns_between(t0, t1), 0);
  return rs;
}

std::string senders_query_kql() {
  return "SELECT DISTINCT ALL*email_address*_:source FROM ALL/emailmessage "
         "WHERE (ALL*folder = 'sent_items' OR ALL*folder = 'sent')";
}

std::string per_sender_query_kql(const std::string& sender,
                                 const std::string& window_start,
                                 const std::string& window_end) {
  return "SELECT ALL*email_address*_:recipient FROM (SELECT * FROM "
         "ALL/emailmessage WHERE ALL*email_address*_:sender = '" +
         sender + "') AS per_sender WHERE (ALL*datetime*_:sender >= '" +
         window_start + "' AND ALL*datetime*_:sender < '" + window_end + "')";
}

EmailGraph build_email_graph(QueryClient& client, const GraphParams& params,
                             const std::string& window_start,
                             const std::string& window_end) {
  EmailGraph graph;

  ResultSet senders_rs = client.run(senders_query_kql());
  std::vector<std::string> senders;
  for (const auto& row : senders_rs.rows) {
    senders.push_back(std::get<std::string>(row.front()));
  }
  if (senders.empty()) throw Error(Errc::Empty, "no senders in the corpus");
  if (params.initial_senders &&
      static_cast<std::int64_t>(senders.size()) > *params.initial_senders) {
    senders.resize(static_cast<std::size_t>(*params.initial_senders));
  }
  graph.senders = senders;

  auto note_node = [&graph](const std::string& address) {
    if (std::find(graph.nodes.begin(), graph.nodes.end(), address) ==
        graph.nodes.end()) {
      graph.nodes.push_back(address);
    }
  };

  for (const auto& sender : senders) {
    ResultSet rs =
        client.run(per_sender_query_kql(sender, window_start, window_end));
    std::map<std::string, std::int64_t> counts;
    for (const auto& row : rs.rows) {
      ++counts[std::get<std::string>(row.front())];
    }
    for (const auto& [recipient, count] : counts) {
      if (count >= params.min_messages) {
        graph.edges[{sender, recipient}] = count;
        note_node(sender);
        note_node(recipient);
      }
    }
  }
  return graph;
}

namespace {

struct UndirectedGraph {
  std::vector<std::string> names;                 // node index -> address
  std::vector<std::vector<int>> adj;              // adjacency lists
  std::set<std::pair<int, int>> edges;            // (min, max) index pairs

  void remove_edge(std::pair<int, int> e) {
    edges.erase(e);
    auto drop = [this](int from, int to) {
      auto& list = adj[from];
      list.erase(std::remove(list.begin(), list.end(), to), list.end());
    };
    drop(e.first, e.second);
    drop(e.second, e.first);
  }
};

UndirectedGraph project(const EmailGraph& g) {
  UndirectedGraph u;
  std::map<std::string, int> index;
  for (const auto& node : g.nodes) {
    index[node] = static_cast<int>(u.names.size());
    u.names.push_back(node);
  }
  u.adj.resize(u.names.size());
  for (const auto& [edge, count] : g.edges) {
    (void)count;
    int a = index.at(edge.first);
    int b = index.at(edge.second);
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (u.edges.insert({key.first, key.second}).second) {
      u.adj[a].push_back(b);
      u.adj[b].push_back(a);
    }
  }
  return u;
}

std::vector<std::vector<int>> components_of(const UndirectedGraph& g) {
  std::vector<std::vector<int>> comps;
  std::vector<bool> seen(g.names.size(), false);
  for (int start = 0; start < static_cast<int>(g.names.size()); ++start) {
    if (seen[start]) continue;
    std::vector<int> comp;
    std::vector<int> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      comp.push_back(v);
      for (int w : g.adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

// Brandes accumulation of shortest-path edge betweenness on the unweighted
// undirected graph. Every unordered pair is counted from both endpoints, so
// totals are halved at the end.
std::map<std::pair<int, int>, double> edge_betweenness(const UndirectedGraph& g) {
  const int n = static_cast<int>(g.names.size());
  std::map<std::pair<int, int>, double> bc;
  for (const auto& e : g.edges) bc[e] = 0.0;

  std::vector<int> dist(n), order;
  std::vector<double> sigma(n), delta(n);
  std::vector<std::vector<int>> preds(n);

  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    order.clear();

    dist[s] = 0;
    sigma[s] = 1.0;
    std::vector<int> queue{s};
    std::size_t head = 0;
    while (head < queue.size()) {
      int v = queue[head++];
      order.push_back(v);
      for (int w : g.adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int w = *it;
      for (int v : preds[w]) {
        const double share = sigma[v] / sigma[w] * (1.0 + delta[w]);
        auto key = std::minmax(v, w);
        bc[{key.first, key.second}] += share;
        delta[v] += share;
      }
    }
  }
  for (auto& [edge, value] : bc) {
    (void)edge;
    value /= 2.0;
  }
  return bc;
}

}  // namespace

std::vector<std::vector<std::string>> girvan_newman(const EmailGraph& graph,
                                                    int target_components) {
  if (graph.nodes.empty()) {
    throw Error(Errc::Empty, "graph has no nodes");
  }
  UndirectedGraph g = project(graph);

  while (static_cast<int>(components_of(g).size()) < target_components &&
         !g.edges.empty()) {
    auto bc = edge_betweenness(g);
    double best = -1.0;
    for (const auto& [edge, value] : bc) {
      (void)edge;
      best = std::max(best, value);
    }
    const double eps = 1e-9 * std::max(1.0, best);
    // Candidates within tolerance of the maximum; pick the lexicographically
    // smallest endpoint pair. Map order over (name, name) gives that directly.
    std::pair<int, int> chosen{-1, -1};
    std::pair<std::string, std::string> chosen_names;
    for (const auto& [edge, value] : bc) {
      if (value < best - eps) continue;
      auto names = std::minmax(g.names[edge.first], g.names[edge.second]);
      std::pair<std::string, std::string> name_pair{names.first, names.second};
      if (chosen.first < 0 || name_pair < chosen_names) {
        chosen = edge;
        chosen_names = name_pair;
      }
    }
    g.remove_edge(chosen);
  }

  std::vector<std::vector<std::string>> communities;
  for (const auto& comp : components_of(g)) {
    std::vector<std::string> names;
    for (int v : comp) names.push_back(g.names[v]);
    std::sort(names.begin(), names.end());
    communities.push_back(std::move(names));
  }
  std::sort(communities.begin(), communities.end());
  return communities;
}

std::string communities_digest(
    const std::vector<std::vector<std::string>>& communities) {
  // Canonicalize: sort members and communities, then FNV-1a over the joined
  // text. Order-insensitive by construction.
  std::vector<std::string> parts;
  for (const auto& community : communities) {
    std::vector<std::string> sorted = community;
    std::sort(sorted.begin(), sorted.end());
    std::string joined;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      joined += (i ? "," : "") + sorted[i];
    }
    parts.push_back(std::move(joined));
  }
  std::sort(parts.begin(), parts.end());
  std::string canonical;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    canonical += (i ? ";" : "") + parts[i];
  }

  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

BenchReport run_benchmark(const CorpusSpec& spec, const BenchParams& params,
                          BenchMode mode, const Registry& registry,
                          const std::string& workdir) {
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  const std::string corpus_path =
      (fs::path(workdir) / "email_message_table.jsonl").string();
  generate_corpus_file(spec, corpus_path);

  Database db;
  db.add(load_table_file(corpus_path, "email_message_table", email_schema()));

  const char* mode_name = mode == BenchMode::Kql ? "kql" : "direct";
  const std::string result_path =
      (fs::path(workdir) / (std::string("result_") + mode_name + ".jsonl"))
          .string();

  std::unique_ptr<QueryClient> client;
  if (mode == BenchMode::Kql) {
    client = std::make_unique<KqlClient>(registry, db, result_path);
  } else {
    client = std::make_unique<DirectClient>(registry, db, result_path);
  }

  // Warm the allocator and code paths before the measured calls.
  (void)rewrite(parse_kql(senders_query_kql()), registry);

  GraphParams graph_params;
  graph_params.min_messages = params.min_messages;
  graph_params.initial_senders = params.initial_senders;
  EmailGraph graph = build_email_graph(*client, graph_params, spec.start.text,
                                       spec.end.text);
  auto communities = girvan_newman(graph, params.target_communities);

  const CallStats& stats = client->stats();
  BenchReport report;
  report.mode = mode_name;
  report.n_calls = stats.n_calls;
  report.total_ns = stats.total_ns;
  report.per_call_mean_ns =
      stats.n_calls ? static_cast<double>(stats.total_ns) / stats.n_calls : 0.0;
  report.per_call_min_ns = stats.min_ns;
  report.per_call_max_ns = stats.max_ns;
  report.rewrite_per_call_mean_ns =
      stats.n_calls ? static_cast<double>(stats.rewrite_total_ns) / stats.n_calls
                    : 0.0;
  report.result_digest = communities_digest(communities);
  report.n_communities = static_cast<std::int64_t>(communities.size());
  return report;
}

std::string render_bench_reports(const std::vector<BenchReport>& reports) {
  json doc = json::object();
  doc["reports"] = json::array();
  const BenchReport* kql_report = nullptr;
  const BenchReport* direct_report = nullptr;
  for (const auto& r : reports) {
    json obj = json::object();
    obj["mode"] = r.mode;
    obj["n_calls"] = r.n_calls;
    obj["total_ns"] = r.total_ns;
    obj["per_call_ns"] = json{{"mean", r.per_call_mean_ns},
                              {"min", r.per_call_min_ns},
                              {"max", r.per_call_max_ns}};
    obj["rewrite_per_call_mean_ns"] = r.rewrite_per_call_mean_ns;
    obj["result_digest"] = r.result_digest;
    obj["n_communities"] = r.n_communities;
    doc["reports"].push_back(std::move(obj));
    if (r.mode == "kql") kql_report = &r;
    if (r.mode == "direct") direct_report = &r;
  }
  if (kql_report && direct_report) {
    if (direct_report->per_call_mean_ns > 0) {
      doc["overhead_ratio"] =
          kql_report->per_call_mean_ns / direct_report->per_call_mean_ns;
    }
    doc["digests_match"] =
        kql_report->result_digest == direct_report->result_digest;
  }
  return doc.dump(2) + "\n";
}

}  // namespace kql
