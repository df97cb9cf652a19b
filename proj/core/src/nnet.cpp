#include "boreal/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "boreal/errors.hpp"

namespace boreal {

namespace {

/// Rows (or columns when rows > cols) orthonormal, scaled by `gain`.
void orthogonal_fill(double* w, std::size_t rows, std::size_t cols, double gain, RngStream& rng) {
  std::vector<double> a(rows * cols);
  for (double& x : a) x = rng.normal();
  const bool by_rows = rows <= cols;
  const std::size_t count = by_rows ? rows : cols;
  const std::size_t length = by_rows ? cols : rows;
  auto at = [&](std::size_t v, std::size_t i) -> double& {
    return by_rows ? a[v * cols + i] : a[i * cols + v];
  };
  for (std::size_t v = 0; v < count; ++v) {
    for (std::size_t u = 0; u < v; ++u) {
      double dot = 0.0;
      for (std::size_t i = 0; i < length; ++i) dot += at(v, i) * at(u, i);
      for (std::size_t i = 0; i < length; ++i) at(v, i) -= dot * at(u, i);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < length; ++i) norm += at(v, i) * at(v, i);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < length; ++i) at(v, i) = norm > 0.0 ? at(v, i) / norm : 0.0;
  }
  for (std::size_t i = 0; i < rows * cols; ++i) w[i] = gain * a[i];
}

void affine(const double* w, const double* b, std::span<const double> x, std::vector<double>& y,
            std::size_t out) {
  y.assign(out, 0.0);
  const std::size_t in = x.size();
  for (std::size_t o = 0; o < out; ++o) {
    const double* row = w + o * in;
    double acc = b[o];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

}  // namespace

std::size_t MlpSpec::parameter_count() const {
  std::size_t n = 0, prev = input_dim;
  for (std::size_t h : hidden) {
    n += h * prev + h;
    prev = h;
  }
  for (const HeadSpec& head : heads) n += head.size * prev + head.size;
  return n;
}

void GradientTape::zero_gradient() { std::fill(gradient.begin(), gradient.end(), 0.0); }

double GradientTape::gradient_norm() const {
  double s = 0.0;
  for (double g : gradient) s += g * g;
  return std::sqrt(s);
}

double GradientTape::clip_gradient_norm(double max_norm) {
  const double norm = gradient_norm();
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : gradient) g *= scale;
  }
  return norm;
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  require(spec_.input_dim > 0, "Mlp: input_dim must be positive");
  require(!spec_.heads.empty(), "Mlp: at least one head required");
  require(spec_.activation == "tanh", "Mlp: only tanh activation is supported");
  std::size_t offset = 0, prev = spec_.input_dim;
  for (std::size_t h : spec_.hidden) {
    require(h > 0, "Mlp: hidden layer of size 0");
    trunk_.push_back({prev, h, offset, offset + h * prev});
    offset += h * prev + h;
    prev = h;
  }
  for (const HeadSpec& head : spec_.heads) {
    require(head.size > 0, "Mlp: head '" + head.name + "' of size 0");
    head_layers_.push_back({prev, head.size, offset, offset + head.size * prev});
    offset += head.size * prev + head.size;
  }
  params_.assign(offset, 0.0);
}

void Mlp::initialize(RngStream& rng) {
  require(spec_.init == "orthogonal", "Mlp: unknown init scheme '" + spec_.init + "'");
  std::fill(params_.begin(), params_.end(), 0.0);
  for (const Layer& l : trunk_)
    orthogonal_fill(params_.data() + l.weight_offset, l.out, l.in, spec_.hidden_gain, rng);
  for (std::size_t h = 0; h < head_layers_.size(); ++h) {
    const Layer& l = head_layers_[h];
    orthogonal_fill(params_.data() + l.weight_offset, l.out, l.in, spec_.heads[h].init_gain, rng);
  }
}

std::size_t Mlp::head_index(std::string_view name) const {
  for (std::size_t i = 0; i < spec_.heads.size(); ++i)
    if (spec_.heads[i].name == name) return i;
  throw ContractViolation("Mlp: no head named '" + std::string(name) + "'");
}

void Mlp::forward(std::span<const double> input, ForwardCache& cache) const {
  require(input.size() == spec_.input_dim,
          "Mlp::forward: input length " + std::to_string(input.size()) + " != " +
              std::to_string(spec_.input_dim));
  cache.layers.resize(trunk_.size() + 1);
  cache.layers[0].assign(input.begin(), input.end());
  for (std::size_t k = 0; k < trunk_.size(); ++k) {
    const Layer& l = trunk_[k];
    affine(params_.data() + l.weight_offset, params_.data() + l.bias_offset, cache.layers[k],
           cache.layers[k + 1], l.out);
    for (double& v : cache.layers[k + 1]) v = std::tanh(v);
  }
  cache.heads.resize(head_layers_.size());
  for (std::size_t h = 0; h < head_layers_.size(); ++h) {
    const Layer& l = head_layers_[h];
    affine(params_.data() + l.weight_offset, params_.data() + l.bias_offset, cache.layers.back(),
           cache.heads[h], l.out);
  }
}

void Mlp::backward(const ForwardCache& cache, const std::vector<std::vector<double>>& head_gradients,
                   std::vector<double>& gradient) const {
  require(gradient.size() == params_.size(), "Mlp::backward: gradient size mismatch");
  require(head_gradients.size() == head_layers_.size(), "Mlp::backward: one gradient per head");
  require(cache.layers.size() == trunk_.size() + 1, "Mlp::backward: forward cache missing");
  const std::vector<double>& top = cache.layers.back();
  std::vector<double> d_act(top.size(), 0.0);

  for (std::size_t h = 0; h < head_layers_.size(); ++h) {
    const std::vector<double>& g = head_gradients[h];
    if (g.empty()) continue;
    const Layer& l = head_layers_[h];
    require(g.size() == l.out, "Mlp::backward: head gradient size mismatch");
    const double* w = params_.data() + l.weight_offset;
    double* gw = gradient.data() + l.weight_offset;
    double* gb = gradient.data() + l.bias_offset;
    for (std::size_t o = 0; o < l.out; ++o) {
      if (g[o] == 0.0) continue;
      gb[o] += g[o];
      for (std::size_t i = 0; i < l.in; ++i) {
        gw[o * l.in + i] += g[o] * top[i];
        d_act[i] += g[o] * w[o * l.in + i];
      }
    }
  }

  for (std::size_t k = trunk_.size(); k-- > 0;) {
    const Layer& l = trunk_[k];
    const std::vector<double>& out = cache.layers[k + 1];
    const std::vector<double>& in = cache.layers[k];
    const double* w = params_.data() + l.weight_offset;
    double* gw = gradient.data() + l.weight_offset;
    double* gb = gradient.data() + l.bias_offset;
    std::vector<double> d_in(l.in, 0.0);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double dz = d_act[o] * (1.0 - out[o] * out[o]);
      if (dz == 0.0) continue;
      gb[o] += dz;
      for (std::size_t i = 0; i < l.in; ++i) {
        gw[o * l.in + i] += dz * in[i];
        d_in[i] += dz * w[o * l.in + i];
      }
    }
    d_act = std::move(d_in);
  }
}

void adam_step(Mlp& net, GradientTape& tape, double lr, const AdamHyper& hyper) {
  std::vector<double>& p = net.parameters();
  require(tape.gradient.size() == p.size() && tape.first_moment.size() == p.size() &&
              tape.second_moment.size() == p.size(),
          "adam_step: tape does not match the network");
  ++tape.step;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(tape.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(tape.step));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = tape.gradient[i];
    tape.first_moment[i] = hyper.beta1 * tape.first_moment[i] + (1.0 - hyper.beta1) * g;
    tape.second_moment[i] = hyper.beta2 * tape.second_moment[i] + (1.0 - hyper.beta2) * g * g;
    if (g == 0.0 && tape.first_moment[i] == 0.0) continue;
    const double m_hat = tape.first_moment[i] / c1;
    const double v_hat = tape.second_moment[i] / c2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

std::vector<double> masked_softmax(std::span<const double> logits, std::span<const bool> mask) {
  require(mask.empty() || mask.size() == logits.size(), "masked_softmax: mask size mismatch");
  auto valid = [&](std::size_t i) { return mask.empty() || mask[i]; };
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (valid(i)) top = std::max(top, logits[i]);
  require(std::isfinite(top), "masked_softmax: every entry is masked");
  std::vector<double> p(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    if (valid(i)) sum += (p[i] = std::exp(logits[i] - top));
  for (double& v : p) v /= sum;
  return p;
}

const Mlp& Checkpoint::network(std::string_view name) const {
  for (const auto& [n, net] : networks)
    if (n == name) return net;
  throw FormatError("checkpoint has no network '" + std::string(name) + "'");
}

namespace {

constexpr char kMagic[8] = {'B', 'O', 'R', 'E', 'A', 'L', 'C', 'K'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(const std::string& s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <typename T>
  T pod() {
    if (pos_ + sizeof(T) > data_.size()) throw FormatError("checkpoint truncated");
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    if (n > data_.size() - pos_) throw FormatError("checkpoint truncated");
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  Writer w;
  w.bytes().append(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(Checkpoint::kVersion);
  w.str(c.algorithm);
  w.pod<std::uint64_t>(c.networks.size());
  for (const auto& [name, net] : c.networks) {
    const MlpSpec& s = net.spec();
    w.str(name);
    w.pod<std::uint64_t>(s.input_dim);
    w.pod<std::uint64_t>(s.hidden.size());
    for (std::size_t h : s.hidden) w.pod<std::uint64_t>(h);
    w.pod<std::uint64_t>(s.heads.size());
    for (const HeadSpec& h : s.heads) {
      w.str(h.name);
      w.pod<std::uint64_t>(h.size);
      w.pod<double>(h.init_gain);
    }
    w.str(s.activation);
    w.str(s.init);
    w.pod<double>(s.hidden_gain);
    w.pod<std::uint64_t>(net.parameter_count());
    for (double v : net.parameters()) w.pod<double>(v);
  }
  w.pod<std::uint64_t>(c.seeds.size());
  for (const auto& [k, v] : c.seeds) {
    w.str(k);
    w.pod<std::uint64_t>(v);
  }
  w.pod<std::uint64_t>(c.metadata.size());
  for (const auto& [k, v] : c.metadata) {
    w.str(k);
    w.str(v);
  }
  const std::uint64_t checksum = fnv1a(w.bytes());
  w.pod<std::uint64_t>(checksum);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint '" + path + "'");
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw FormatError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (data.size() < sizeof(kMagic) + 4 + 8 || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("'" + path + "' is not a boreal checkpoint");
  const std::string body = data.substr(0, data.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, data.data() + data.size() - 8, 8);

  Reader r(std::string_view(body).substr(sizeof(kMagic)));
  const auto version = r.pod<std::uint32_t>();
  if (version != Checkpoint::kVersion)
    throw FormatError("checkpoint format version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(Checkpoint::kVersion) + ")");
  if (fnv1a(body) != stored) throw FormatError("checkpoint '" + path + "' is corrupt (checksum)");

  Checkpoint c;
  c.algorithm = r.str();
  const auto n_nets = r.pod<std::uint64_t>();
  for (std::uint64_t k = 0; k < n_nets; ++k) {
    std::string name = r.str();
    MlpSpec s;
    s.input_dim = r.pod<std::uint64_t>();
    const auto n_hidden = r.pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < n_hidden; ++i) s.hidden.push_back(r.pod<std::uint64_t>());
    const auto n_heads = r.pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < n_heads; ++i) {
      HeadSpec h;
      h.name = r.str();
      h.size = r.pod<std::uint64_t>();
      h.init_gain = r.pod<double>();
      s.heads.push_back(h);
    }
    s.activation = r.str();
    s.init = r.str();
    s.hidden_gain = r.pod<double>();
    Mlp net;
    try {
      net = Mlp(s);
    } catch (const ContractViolation& e) {
      throw FormatError(std::string("checkpoint network spec invalid: ") + e.what());
    }
    const auto count = r.pod<std::uint64_t>();
    if (count != net.parameter_count()) throw FormatError("checkpoint parameter count mismatch");
    for (double& v : net.parameters()) v = r.pod<double>();
    c.networks.emplace_back(std::move(name), std::move(net));
  }
  const auto n_seeds = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_seeds; ++i) {
    std::string k = r.str();
    c.seeds[k] = r.pod<std::uint64_t>();
  }
  const auto n_meta = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    c.metadata[k] = r.str();
  }
  if (!r.at_end()) throw FormatError("checkpoint has trailing bytes");
  return c;
}

}  // namespace boreal
