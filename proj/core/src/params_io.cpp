// Parameter file layout:
//
//   ana-params 1
//   layers <L>
//   layer <i> dense <in> <out>
//   layer <i> conv2d <channels> <height> <width> <out_channels> <kernel> <stride> <padding>
//   activation <i> none | activation <i> <family> levels <q...> thresholds <θ...>
//   weights <i> none    | weights <i> <family> levels <q...> thresholds <θ...>
//   data <count>
//   <count little-endian IEEE-754 doubles>
//
// Per layer the data block holds the latent weight matrix row-major, then the
// bias vector.

#include <bit>
#include <cstdint>
#include <fstream>
#include <locale>
#include <sstream>

#include "ana/errors.hpp"
#include "ana/network.hpp"

namespace ana {

namespace {

void write_activation(std::ostream& os, const char* tag, std::size_t i, const std::optional<ActivationSpec>& a) {
  os << tag << ' ' << i;
  if (!a) {
    os << " none\n";
    return;
  }
  os << ' ' << to_string(a->family) << " levels";
  for (double v : a->quantiser.levels()) os << ' ' << v;
  os << " thresholds";
  for (double v : a->quantiser.thresholds()) os << ' ' << v;
  os << '\n';
}

std::string header_for(const Network& net) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "ana-params 1\n";
  os << "layers " << net.depth() << '\n';
  std::size_t count = 0;
  for (std::size_t i = 0; i < net.depth(); ++i) {
    const auto& l = net.layer(i);
    if (l.kind == LayerKind::dense) {
      os << "layer " << i << " dense " << l.in_size << ' ' << l.out_size << '\n';
    } else {
      const auto& g = l.conv;
      os << "layer " << i << " conv2d " << g.in_channels << ' ' << g.height << ' ' << g.width << ' '
         << g.out_channels << ' ' << g.kernel << ' ' << g.stride << ' ' << g.padding << '\n';
    }
    write_activation(os, "activation", i, l.activation);
    write_activation(os, "weights", i, l.weight_quantiser);
    count += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  }
  os << "data " << count << '\n';
  return os.str();
}

void put_double(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (char& b : bytes) {
    b = static_cast<char>(bits & 0xffU);
    bits >>= 8;
  }
  os.write(bytes, 8);
}

double get_double(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw ShapeError("parameter file is truncated");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_params(const Network& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << header_for(net);
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_double(os, l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put_double(os, l.bias(r));
  }
  if (!os) throw Error("failed writing " + path.string());
}

void load_params(Network& net, const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  const std::string expected = header_for(net);
  std::string header;
  std::string line;
  while (std::getline(is, line)) {
    header += line;
    header += '\n';
    if (line.rfind("data ", 0) == 0) break;
    if (header.size() > expected.size() + 4096) break;
  }
  if (header != expected) throw ShapeError("parameter file " + path.string() + " describes a different architecture");
  for (std::size_t i = 0; i < net.depth(); ++i) {
    auto& l = net.layer(i);
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = get_double(is);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = get_double(is);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ShapeError("parameter file has trailing data");
  net.clear_cache();
}

}  // namespace ana
