#include "isc/graph.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "isc/errors.hpp"

namespace isc {

Graph::Graph(int n, const std::vector<std::pair<int, int>>& pairs) : n_(n) {
  if (n < 0) throw ParameterError("graph node count must be nonnegative");
  adj_.resize(n_);
  edges_.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_)
      throw ParameterError("edge endpoint out of range [0, n)");
    if (a == b) {
      ++dropped_self_loops_;
      continue;
    }
    if (a > b) std::swap(a, b);
    edges_.emplace_back(a, b);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto last = std::unique(edges_.begin(), edges_.end());
  dropped_duplicates_ = static_cast<int>(edges_.end() - last);
  edges_.erase(last, edges_.end());
  for (const auto& [a, b] : edges_) {
    adj_[a].push_back(b);
    adj_[b].push_back(a);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

bool Graph::has_edge(int i, int j) const {
  const auto& nb = adj_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

Eigen::MatrixXd Graph::dense_adjacency() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [i, j] : edges_) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return a;
}

DegreeStats degree_stats(const Graph& g) {
  if (g.node_count() < 1) throw ParameterError("degree_stats requires n >= 1");
  DegreeStats s;
  s.d_min = g.degree(0);
  s.d_max = g.degree(0);
  long long total = 0;
  for (int i = 0; i < g.node_count(); ++i) {
    const int d = g.degree(i);
    s.d_min = std::min(s.d_min, d);
    s.d_max = std::max(s.d_max, d);
    total += d;
  }
  s.d_bar = static_cast<double>(total) / g.node_count();
  s.d_mid = 0.5 * (s.d_max + s.d_min);
  return s;
}

namespace {

// Parses one integer token; throws DataError naming the line on junk.
long long parse_id(const std::string& tok, int line_no, const std::string& path) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size())
    throw DataError(path + ":" + std::to_string(line_no) + ": expected integer, got '" +
                    tok + "'");
  return v;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

bool is_comment_or_blank(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

Graph load_edge_list(const std::string& path, Indexing indexing) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list '" + path + "'");

  const long long adjust = (indexing == Indexing::OneBased) ? 1 : 0;
  long long header_n = -1;
  std::vector<std::pair<long long, long long>> raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    if (line.rfind("n=", 0) == 0) {
      header_n = parse_id(line.substr(2), line_no, path);
      if (header_n < 0) throw DataError(path + ": header node count must be nonnegative");
      continue;
    }
    const auto toks = tokenize(line);
    if (toks.size() != 2)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected two node ids, got " + std::to_string(toks.size()) +
                      " tokens");
    const long long a = parse_id(toks[0], line_no, path) - adjust;
    const long long b = parse_id(toks[1], line_no, path) - adjust;
    if (a < 0 || b < 0)
      throw DataError(path + ":" + std::to_string(line_no) + ": negative node id");
    raw.emplace_back(a, b);
  }

  // Decide the id mapping: header wins; otherwise identity when ids are
  // dense from 0, else a rank remap over the distinct ids seen.
  std::vector<long long> distinct;
  distinct.reserve(2 * raw.size());
  for (const auto& [a, b] : raw) {
    distinct.push_back(a);
    distinct.push_back(b);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(raw.size());
  std::vector<long long> original_ids;
  int n = 0;
  if (header_n >= 0) {
    n = static_cast<int>(header_n);
    for (const auto& [a, b] : raw) {
      if (a >= header_n || b >= header_n)
        throw DataError(path + ": node id " + std::to_string(std::max(a, b)) +
                        " out of range for declared n=" + std::to_string(header_n));
      pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  } else if (distinct.empty()) {
    n = 0;
  } else if (distinct.back() + 1 == static_cast<long long>(distinct.size())) {
    n = static_cast<int>(distinct.size());
    for (const auto& [a, b] : raw)
      pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  } else {
    // Sparse ids: dense rank remap, original ids kept for persistence.
    n = static_cast<int>(distinct.size());
    const auto rank = [&distinct](long long id) {
      return static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), id) -
                              distinct.begin());
    };
    for (const auto& [a, b] : raw) pairs.emplace_back(rank(a), rank(b));
    original_ids = distinct;
  }

  Graph g(n, pairs);
  if (!original_ids.empty()) g.set_original_ids(std::move(original_ids));
  return g;
}

LabelVector load_labels(const std::string& path, int expected_n) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file '" + path + "'");

  std::vector<std::pair<long long, long long>> node_label;  // (node, label)
  bool saw_single = false, saw_pair = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const auto toks = tokenize(line);
    if (toks.size() == 1) {
      saw_single = true;
      node_label.emplace_back(static_cast<long long>(node_label.size()),
                              parse_id(toks[0], line_no, path));
    } else if (toks.size() == 2) {
      saw_pair = true;
      node_label.emplace_back(parse_id(toks[0], line_no, path),
                              parse_id(toks[1], line_no, path));
    } else {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'label' or 'node label'");
    }
    if (saw_single && saw_pair)
      throw DataError(path + ": mixed single-column and node-label formats");
  }
  if (node_label.empty()) throw DataError(path + ": empty label file");

  if (saw_pair) {
    std::sort(node_label.begin(), node_label.end());
    for (std::size_t i = 1; i < node_label.size(); ++i)
      if (node_label[i].first == node_label[i - 1].first)
        throw DataError(path + ": duplicate node id " +
                        std::to_string(node_label[i].first));
  }
  if (expected_n >= 0 && static_cast<long long>(node_label.size()) != expected_n)
    throw DataError(path + ": has " + std::to_string(node_label.size()) +
                    " labels, expected " + std::to_string(expected_n));

  // Remap labels to 1..K by ascending original value.
  std::map<long long, int> remap;
  for (const auto& [node, lab] : node_label) remap[lab] = 0;
  int next = 1;
  for (auto& [lab, id] : remap) id = next++;

  LabelVector lv;
  lv.k = static_cast<int>(remap.size());
  lv.labels.reserve(node_label.size());
  for (const auto& [node, lab] : node_label) lv.labels.push_back(remap[lab]);
  return lv;
}

void save_edge_list(const std::string& path, const Graph& g) {
  std::ostringstream out;
  out << "n=" << g.node_count() << "\n";
  for (const auto& [i, j] : g.edges()) out << i << " " << j << "\n";
  write_text_atomic(path, out.str());
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
  std::ostringstream out;
  for (const int l : labels) out << l << "\n";
  write_text_atomic(path, out.str());
}

std::pair<Graph, std::vector<int>> largest_connected_component(const Graph& g) {
  const int n = g.node_count();
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    const int c = n_comp++;
    stack.push_back(s);
    comp[s] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const int v : g.neighbors(u)) {
        if (comp[v] == -1) {
          comp[v] = c;
          stack.push_back(v);
        }
      }
    }
  }

  std::vector<int> size(n_comp, 0);
  for (int i = 0; i < n; ++i) ++size[comp[i]];
  // Largest component; ties go to the one seen first, i.e. containing the
  // smallest node id, because components are discovered in id order.
  int best = 0;
  for (int c = 1; c < n_comp; ++c)
    if (size[c] > size[best]) best = c;

  std::vector<int> keep;
  std::vector<int> new_id(n, -1);
  for (int i = 0; i < n; ++i) {
    if (comp[i] == best) {
      new_id[i] = static_cast<int>(keep.size());
      keep.push_back(i);
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [i, j] : g.edges())
    if (comp[i] == best && comp[j] == best) pairs.emplace_back(new_id[i], new_id[j]);
  return {Graph(static_cast<int>(keep.size()), pairs), keep};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw DataError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
    throw DataError("cannot rename '" + tmp.string() + "' to '" + target.string() +
                    "': " + ec.message());
}

}  // namespace isc
