#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tcodrl/domain.hpp"

namespace tcodrl::nn {

/// Checkpoint could not be read or does not fit the expected architecture.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

template <typename Scalar>
struct Dense {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix weights;  // out x in
  Vector bias;     // out

  bool operator==(const Dense& o) const {
    return weights.rows() == o.weights.rows() && weights.cols() == o.weights.cols() &&
           weights == o.weights && bias == o.bias;
  }
};

/// One gradient per parameter tensor, shape-congruent with the owning Mlp.
template <typename Scalar>
struct GradientSet {
  std::vector<Dense<Scalar>> layers;

  GradientSet& operator+=(const GradientSet& o) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      layers[i].weights += o.layers[i].weights;
      layers[i].bias += o.layers[i].bias;
    }
    return *this;
  }
  GradientSet& operator*=(Scalar s) {
    for (auto& l : layers) {
      l.weights *= s;
      l.bias *= s;
    }
    return *this;
  }
  bool all_finite() const {
    for (const auto& l : layers) {
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }
  bool is_zero() const {
    for (const auto& l : layers) {
      if (!l.weights.isZero(0) || !l.bias.isZero(0)) return false;
    }
    return true;
  }
};

/// Fully connected network: rectifier on hidden layers, identity on the output.
template <typename Scalar>
class Mlp {
 public:
  using Layer = Dense<Scalar>;
  using Matrix = typename Layer::Matrix;
  using Vector = typename Layer::Vector;

  Mlp() = default;

  /// Zero-initialized network with layer widths `sizes` = [in, h1, ..., out].
  explicit Mlp(std::vector<Eigen::Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw Error("an Mlp needs at least input and output sizes");
    for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
      if (sizes_[i] < 1 || sizes_[i + 1] < 1) throw Error("layer sizes must be positive");
      layers_.push_back({Matrix::Zero(sizes_[i + 1], sizes_[i]), Vector::Zero(sizes_[i + 1])});
    }
  }

  /// Uniform initialization in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  template <typename Gen>
  static Mlp random(std::vector<Eigen::Index> sizes, Gen& gen) {
    Mlp net(std::move(sizes));
    for (auto& l : net.layers_) {
      const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(l.weights.cols()));
      std::uniform_real_distribution<Scalar> u(-bound, bound);
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = u(gen);
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = u(gen);
    }
    return net;
  }

  Eigen::Index input_size() const { return sizes_.front(); }
  Eigen::Index output_size() const { return sizes_.back(); }
  const std::vector<Eigen::Index>& sizes() const noexcept { return sizes_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& layers() noexcept { return layers_; }

  Vector forward(const Vector& x) const {
    check_input(x);
    Vector a = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Vector z = layers_[i].weights * a + layers_[i].bias;
      a = (i + 1 < layers_.size()) ? Vector(z.cwiseMax(Scalar(0))) : z;
    }
    return a;
  }

  /// Gradient of 0.5 * (target - Q(x, action))^2 where td_error = target - Q(x, action).
  /// Only the chosen output unit carries loss signal.
  GradientSet<Scalar> backward(const Vector& x, Eigen::Index action, Scalar td_error) const {
    check_input(x);
    if (action < 0 || action >= output_size()) throw Error("action index outside the output layer");
    std::vector<Vector> acts;  // acts[i] is the input of layer i
    acts.reserve(layers_.size());
    Vector a = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      acts.push_back(a);
      Vector z = layers_[i].weights * a + layers_[i].bias;
      a = (i + 1 < layers_.size()) ? Vector(z.cwiseMax(Scalar(0))) : z;
    }

    GradientSet<Scalar> g;
    g.layers.resize(layers_.size());
    Vector delta = Vector::Zero(output_size());
    delta(action) = -td_error;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      g.layers[i].weights = delta * acts[i].transpose();
      g.layers[i].bias = delta;
      if (i == 0) break;
      Vector back = layers_[i].weights.transpose() * delta;
      // acts[i] is the rectified output of layer i-1
      delta = back.array() * (acts[i].array() > Scalar(0)).template cast<Scalar>();
    }
    return g;
  }

  /// Plain gradient descent: theta <- theta - rate * g. Throws on a non-finite gradient.
  void apply_update(const GradientSet<Scalar>& g, Scalar rate) {
    if (g.layers.size() != layers_.size()) throw Error("gradient does not match the network");
    if (!g.all_finite()) throw Error("non-finite gradient");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (g.layers[i].weights.rows() != layers_[i].weights.rows() ||
          g.layers[i].weights.cols() != layers_[i].weights.cols()) {
        throw Error("gradient shape mismatch at layer " + std::to_string(i));
      }
      layers_[i].weights -= rate * g.layers[i].weights;
      layers_[i].bias -= rate * g.layers[i].bias;
    }
  }

  GradientSet<Scalar> zero_gradient() const {
    GradientSet<Scalar> g;
    for (const auto& l : layers_) {
      g.layers.push_back({Matrix::Zero(l.weights.rows(), l.weights.cols()), Vector::Zero(l.bias.size())});
    }
    return g;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

  bool operator==(const Mlp& o) const { return sizes_ == o.sizes_ && layers_ == o.layers_; }

 private:
  void check_input(const Vector& x) const {
    if (layers_.empty()) throw Error("network has no layers");
    if (x.size() != input_size()) {
      throw Error("input has " + std::to_string(x.size()) + " features, network expects " +
                  std::to_string(input_size()));
    }
  }

  std::vector<Eigen::Index> sizes_;
  std::vector<Layer> layers_;
};

// Checkpoint format (text, one token per whitespace-separated field):
//
//   tcodrl-mlp 1
//   layers <L+1>
//   <in> <h1> ... <out>
//   layer <i> weights <rows> <cols>
//   <row-major weights, one row per line>
//   layer <i> bias <rows>
//   <bias values>
//   end
//
// Values use the shortest decimal that parses back bit-exactly.

namespace detail {

inline std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw CheckpointError("cannot format parameter");
  return std::string(buf, end);
}

class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string word(const char* what) {
    std::string s;
    if (!(in_ >> s)) throw CheckpointError(std::string("checkpoint truncated while reading ") + what);
    return s;
  }
  void expect(const std::string& token) {
    const auto s = word(token.c_str());
    if (s != token) throw CheckpointError("checkpoint corrupt: expected '" + token + "', found '" + s + "'");
  }
  long integer(const char* what) {
    const auto s = word(what);
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw CheckpointError(std::string("checkpoint corrupt: bad integer for ") + what);
    }
    return v;
  }
  double real(const char* what) {
    const auto s = word(what);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw CheckpointError(std::string("checkpoint corrupt: bad number in ") + what);
    }
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace detail

template <typename Scalar>
void save_weights(const Mlp<Scalar>& net, std::ostream& out) {
  out << "tcodrl-mlp 1\n";
  out << "layers " << net.sizes().size() << '\n';
  for (std::size_t i = 0; i < net.sizes().size(); ++i) out << (i ? " " : "") << net.sizes()[i];
  out << '\n';
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& l = net.layers()[i];
    out << "layer " << i << " weights " << l.weights.rows() << ' ' << l.weights.cols() << '\n';
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
        out << (c ? " " : "") << detail::shortest(static_cast<double>(l.weights(r, c)));
      }
      out << '\n';
    }
    out << "layer " << i << " bias " << l.bias.size() << '\n';
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      out << (r ? " " : "") << detail::shortest(static_cast<double>(l.bias(r)));
    }
    out << '\n';
  }
  out << "end\n";
}

template <typename Scalar>
void save_weights(const Mlp<Scalar>& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  save_weights(net, out);
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

template <typename Scalar>
Mlp<Scalar> load_weights(std::istream& in) {
  detail::TokenReader rd(in);
  rd.expect("tcodrl-mlp");
  if (rd.integer("version") != 1) throw CheckpointError("unsupported checkpoint version");
  rd.expect("layers");
  const long n = rd.integer("layer count");
  if (n < 2 || n > 1024) throw CheckpointError("checkpoint corrupt: implausible layer count");
  std::vector<Eigen::Index> sizes;
  for (long i = 0; i < n; ++i) {
    const long s = rd.integer("layer size");
    if (s < 1) throw CheckpointError("checkpoint corrupt: layer size must be positive");
    sizes.push_back(s);
  }
  Mlp<Scalar> net(sizes);
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    auto& l = net.layers()[i];
    const std::string tag = std::to_string(i);
    rd.expect("layer");
    rd.expect(tag);
    rd.expect("weights");
    if (rd.integer("rows") != l.weights.rows() || rd.integer("cols") != l.weights.cols()) {
      throw CheckpointError("checkpoint corrupt: layer " + tag + " weight shape disagrees with header");
    }
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = static_cast<Scalar>(rd.real("weights"));
    }
    rd.expect("layer");
    rd.expect(tag);
    rd.expect("bias");
    if (rd.integer("rows") != l.bias.size()) {
      throw CheckpointError("checkpoint corrupt: layer " + tag + " bias shape disagrees with header");
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = static_cast<Scalar>(rd.real("bias"));
  }
  rd.expect("end");
  if (!net.all_finite()) throw CheckpointError("checkpoint contains non-finite parameters");
  return net;
}

/// Loads and checks the architecture against `expected` sizes; a mismatch names
/// the first offending layer.
template <typename Scalar>
Mlp<Scalar> load_weights(std::istream& in, const std::vector<Eigen::Index>& expected) {
  auto net = load_weights<Scalar>(in);
  const auto& got = net.sizes();
  if (got.size() != expected.size()) {
    throw CheckpointError("shape mismatch: checkpoint has " + std::to_string(got.size() - 1) +
                          " layers, expected " + std::to_string(expected.size() - 1));
  }
  for (std::size_t i = 0; i + 1 < got.size(); ++i) {
    if (got[i] != expected[i] || got[i + 1] != expected[i + 1]) {
      throw CheckpointError("shape mismatch at layer " + std::to_string(i) + ": checkpoint is " +
                            std::to_string(got[i + 1]) + "x" + std::to_string(got[i]) + ", expected " +
                            std::to_string(expected[i + 1]) + "x" + std::to_string(expected[i]));
    }
  }
  return net;
}

template <typename Scalar>
Mlp<Scalar> load_weights(const std::filesystem::path& path, const std::vector<Eigen::Index>& expected) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  return load_weights<Scalar>(in, expected);
}

}  // namespace tcodrl::nn
