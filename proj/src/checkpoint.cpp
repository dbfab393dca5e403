#include "pcn/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "pcn/errors.hpp"

namespace pcn {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'C', 'N', '1'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::size_t value, const char* what) {
    if (value > 0xffffffffULL)
        throw ArgumentError(std::string(what) + " does not fit the checkpoint's u32 field");
    put(out, static_cast<std::uint32_t>(value));
}

void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
    put_u32(out, m.rows(), "matrix rows");
    put_u32(out, m.cols(), "matrix cols");
    for (double v : m.values()) put(out, v);
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        if (bytes_.size() - pos_ < n)
            throw TruncatedCheckpointError("checkpoint truncated while reading " +
                                           std::string(what) + " at byte " +
                                           std::to_string(pos_) + " (need " +
                                           std::to_string(n) + ", have " +
                                           std::to_string(bytes_.size() - pos_) + ")");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::uint32_t u32(const char* what) {
        auto s = take(4, what);
        std::uint32_t v = 0;
        for (std::size_t i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(s[i]) << (8 * i);
        return v;
    }

    double f64(const char* what) {
        auto s = take(8, what);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
        return std::bit_cast<double>(v);
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

Matrix read_matrix(Reader& in, std::size_t rows, std::size_t cols, const std::string& name) {
    const std::uint32_t r = in.u32("matrix header");
    const std::uint32_t c = in.u32("matrix header");
    if (r != rows || c != cols)
        throw ShapeContradictionError(name + " declared " + std::to_string(r) + "x" +
                                      std::to_string(c) + " but the model config implies " +
                                      std::to_string(rows) + "x" + std::to_string(cols));
    const std::size_t count = rows * cols;
    if (in.remaining() / 8 < count)
        throw TruncatedCheckpointError("checkpoint truncated inside " + name + " payload (need " +
                                       std::to_string(count * 8) + " bytes, have " +
                                       std::to_string(in.remaining()) + ")");
    std::vector<double> data(count);
    for (double& v : data) v = in.f64("matrix payload");
    return Matrix(rows, cols, std::move(data));
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const GenerativeStack& stack,
                                            const ModelConfig& config) {
    config.validate();
    check_stack(config, stack);
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    put(out, kCheckpointVersion);
    put_u32(out, config.num_latent_layers(), "layer count");
    for (std::size_t d : config.dims) put_u32(out, d, "layer width");
    put_u32(out, config.output_dim, "output_dim");
    for (Activation a : config.activations) put(out, static_cast<std::uint32_t>(a));
    put(out, config.latent_init_scale);
    for (const Matrix& w : stack.weights) put_matrix(out, w);
    put_matrix(out, stack.readout);
    return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    const std::size_t probe = std::min(bytes.size(), kMagic.size());
    if (std::memcmp(bytes.data(), kMagic.data(), probe) != 0 || bytes.empty())
        throw BadMagicError("not a PCN checkpoint (magic bytes are not \"PCN1\")");
    in.take(kMagic.size(), "magic");
    const std::uint32_t version = in.u32("version");
    if (version != kCheckpointVersion)
        throw VersionMismatchError("checkpoint format version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(kCheckpointVersion) + ")");

    Checkpoint ckpt;
    ModelConfig& config = ckpt.config;
    const std::uint32_t layers = in.u32("layer count");
    if (layers == 0) throw ShapeContradictionError("checkpoint declares zero latent layers");
    if (in.remaining() / 4 < static_cast<std::size_t>(layers) + 1)
        throw TruncatedCheckpointError("checkpoint truncated inside the layer widths");
    config.dims.resize(layers + 1);
    for (auto& d : config.dims) {
        d = in.u32("layer width");
        if (d == 0) throw ShapeContradictionError("checkpoint declares a zero layer width");
    }
    config.output_dim = in.u32("output_dim");
    if (config.output_dim == 0) throw ShapeContradictionError("checkpoint declares output_dim 0");
    config.activations.resize(layers);
    for (auto& a : config.activations) {
        const std::uint32_t tag = in.u32("activation tag");
        if (tag > static_cast<std::uint32_t>(Activation::tanh))
            throw CheckpointError("unknown activation tag " + std::to_string(tag));
        a = static_cast<Activation>(tag);
    }
    config.latent_init_scale = in.f64("latent_init_scale");
    try {
        config.validate();
    } catch (const ArgumentError& e) {
        throw ShapeContradictionError(std::string("checkpoint config is invalid: ") + e.what());
    }

    ckpt.stack.weights.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l)
        ckpt.stack.weights.push_back(
            read_matrix(in, config.dims[l], config.dims[l + 1], "W" + std::to_string(l)));
    ckpt.stack.readout = read_matrix(in, config.output_dim, config.top_dim(), "Wout");
    if (in.remaining() != 0)
        throw ShapeContradictionError(std::to_string(in.remaining()) +
                                      " unexpected trailing bytes after the readout matrix");
    return ckpt;
}

void save_checkpoint(const GenerativeStack& stack, const ModelConfig& config,
                     const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_checkpoint(stack, config);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace pcn
