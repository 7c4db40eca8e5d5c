#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "airgrid/csv.hpp"
#include "airgrid/errors.hpp"
#include "airgrid/gbdt.hpp"

namespace airgrid::gbdt {

namespace {

constexpr const char* kMagic = "airgrid-gbdt-v1";

std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hexf(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ValidationError(std::string("model file: bad ") + what);
  return v;
}

std::string expect_key(std::istream& in, const std::string& key) {
  std::string k;
  if (!(in >> k) || k != key)
    throw ValidationError("model file: expected '" + key + "', got '" + k + "'");
  std::string rest;
  std::getline(in, rest);
  if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
  return rest;
}

}  // namespace

void Ensemble::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file '" + path + "'");
  char buf[64];
  out << kMagic << '\n';
  std::snprintf(buf, sizeof buf, "%016" PRIx64, schema_hash);
  out << "schema_hash " << buf << '\n';
  out << "n_columns " << column_names.size() << '\n';
  for (const std::string& name : column_names) out << "col " << name << '\n';
  out << "base_score " << hexf(base_score) << '\n';
  out << "learning_rate " << hexf(learning_rate) << '\n';
  out << "best_iteration " << best_iteration << '\n';
  out << "config " << config.num_leaves << ' ' << config.min_data_in_leaf << ' '
      << hexf(config.l2_lambda) << ' ' << hexf(config.learning_rate) << ' '
      << config.max_bin << ' ' << config.early_stopping_rounds << ' '
      << hexf(config.goss_top_rate) << ' ' << hexf(config.goss_other_rate) << ' '
      << (config.use_goss ? 1 : 0) << ' ' << config.max_trees << ' ' << config.seed
      << '\n';
  for (int f = 0; f < mapper.n_features(); ++f) {
    const auto& bounds = mapper.upper_bounds(f);
    out << "bins " << f << ' ' << bounds.size();
    for (double b : bounds) out << ' ' << hexf(b);
    out << '\n';
  }
  size_t total_nodes = 0;
  for (const Tree& t : trees) total_nodes += t.nodes.size();
  out << "n_trees " << trees.size() << '\n';
  out << "nodes " << total_nodes << '\n';
  out << "tree_id,node_id,kind,feature,bin_threshold,default_dir,left,right,value,count\n";
  for (size_t t = 0; t < trees.size(); ++t) {
    const Tree& tree = trees[t];
    for (size_t n = 0; n < tree.nodes.size(); ++n) {
      const TreeNode& node = tree.nodes[n];
      out << t << ',' << n << ',' << (node.is_leaf() ? "leaf" : "split") << ','
          << node.feature << ',' << static_cast<int>(node.bin_threshold) << ','
          << (node.default_left ? 'L' : 'R') << ',' << node.left << ',' << node.right
          << ',' << hexf(node.value) << ',' << node.count << '\n';
    }
  }
  out << "end\n";
  if (!out) throw ValidationError("failed while writing model file '" + path + "'");
}

Ensemble Ensemble::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw ValidationError("'" + path + "' is not a model file (bad magic)");

  Ensemble m;
  {
    const std::string hex = expect_key(in, "schema_hash");
    m.schema_hash = std::strtoull(hex.c_str(), nullptr, 16);
  }
  const size_t n_columns = std::stoull(expect_key(in, "n_columns"));
  m.column_names.reserve(n_columns);
  for (size_t i = 0; i < n_columns; ++i) m.column_names.push_back(expect_key(in, "col"));
  m.base_score = parse_hexf(expect_key(in, "base_score"), "base_score");
  m.learning_rate = parse_hexf(expect_key(in, "learning_rate"), "learning_rate");
  m.best_iteration = std::stoi(expect_key(in, "best_iteration"));
  {
    std::istringstream cfg(expect_key(in, "config"));
    std::string l2, lr, a, b;
    int use_goss = 0;
    cfg >> m.config.num_leaves >> m.config.min_data_in_leaf >> l2 >> lr >>
        m.config.max_bin >> m.config.early_stopping_rounds >> a >> b >> use_goss >>
        m.config.max_trees >> m.config.seed;
    if (!cfg) throw ValidationError("model file: bad config line");
    m.config.l2_lambda = parse_hexf(l2, "l2_lambda");
    m.config.learning_rate = parse_hexf(lr, "learning_rate");
    m.config.goss_top_rate = parse_hexf(a, "goss_top_rate");
    m.config.goss_other_rate = parse_hexf(b, "goss_other_rate");
    m.config.use_goss = use_goss != 0;
  }
  m.mapper.bounds_.resize(n_columns);
  for (size_t f = 0; f < n_columns; ++f) {
    std::istringstream bl(expect_key(in, "bins"));
    size_t idx = 0, count = 0;
    bl >> idx >> count;
    if (!bl || idx != f) throw ValidationError("model file: bad bins line");
    auto& bounds = m.mapper.bounds_[f];
    bounds.resize(count);
    std::string tok;
    for (size_t i = 0; i < count; ++i) {
      bl >> tok;
      bounds[i] = parse_hexf(tok, "bin bound");
    }
    if (!bl) throw ValidationError("model file: truncated bins line");
  }
  m.mapper.offsets_.resize(n_columns + 1);
  m.mapper.offsets_[0] = 0;
  for (size_t f = 0; f < n_columns; ++f)
    m.mapper.offsets_[f + 1] =
        m.mapper.offsets_[f] + static_cast<int>(m.mapper.bounds_[f].size()) + 1;

  const size_t n_trees = std::stoull(expect_key(in, "n_trees"));
  const size_t n_nodes = std::stoull(expect_key(in, "nodes"));
  if (!std::getline(in, line))  // node header line
    throw ValidationError("model file: missing node header");
  m.trees.resize(n_trees);
  for (size_t i = 0; i < n_nodes; ++i) {
    if (!std::getline(in, line)) throw ValidationError("model file: truncated node list");
    const auto f = csv::split_line(line);
    if (f.size() != 10) throw ValidationError("model file: bad node line '" + line + "'");
    const size_t tree_id = std::stoull(f[0]);
    const size_t node_id = std::stoull(f[1]);
    if (tree_id >= n_trees) throw ValidationError("model file: node references bad tree");
    TreeNode node;
    node.feature = std::stoi(f[3]);
    node.bin_threshold = static_cast<uint8_t>(std::stoi(f[4]));
    node.default_left = f[5] == "L";
    node.left = std::stoi(f[6]);
    node.right = std::stoi(f[7]);
    node.value = parse_hexf(f[8], "node value");
    node.count = std::stoi(f[9]);
    if (f[2] == "leaf") node.feature = -1;
    auto& nodes = m.trees[tree_id].nodes;
    if (nodes.size() != node_id)
      throw ValidationError("model file: node ids out of order");
    nodes.push_back(node);
  }
  if (!std::getline(in, line) || line != "end")
    throw ValidationError("model file: missing end marker");
  return m;
}

}  // namespace airgrid::gbdt
