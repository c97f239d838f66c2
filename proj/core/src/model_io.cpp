#include "cellcast/model_io.hpp"

#include "cellcast/config_json.hpp"
#include "cellcast/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

namespace cellcast {

namespace {

constexpr std::array<char, 8> kMagic{'C', 'C', 'M', 'O', 'D', 'E', 'L', '\0'};

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

class Reader {
public:
    Reader(std::string_view bytes, std::string path) : bytes_(bytes), path_(std::move(path)) {}

    std::string_view take(std::size_t n) {
        if (n > bytes_.size() - pos_) throw CorruptFileError("model file '" + path_ + "' is truncated");
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int k = 7; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(k)]);
        return v;
    }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int k = 3; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(k)]);
        return v;
    }
    std::vector<double> doubles() {
        const std::uint64_t count = u64();
        if (count > (bytes_.size() - pos_) / 8) throw CorruptFileError("model file '" + path_ + "' is truncated");
        std::vector<double> out(count);
        for (auto& v : out) v = std::bit_cast<double>(u64());
        return out;
    }
    std::size_t position() const { return pos_; }

private:
    std::string_view bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

} // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    const nlohmann::json header = {
        {"network",
         {{"input_size", model.params.input_size()},
          {"hidden_size", model.params.hidden_size()},
          {"num_layers", model.params.num_layers()}}},
        {"train", to_json(model.train_config)},
        {"covariates", to_json(model.covariates)}};
    const std::string header_text = header.dump();

    std::string bytes(kMagic.begin(), kMagic.end());
    put_u32(bytes, kModelFormatVersion);
    put_u64(bytes, header_text.size());
    bytes += header_text;
    const auto values = model.params.values();
    put_u64(bytes, values.size());
    for (double v : values) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
    put_u64(bytes, model.epoch_nll.size());
    for (double v : model.epoch_nll) put_u64(bytes, std::bit_cast<std::uint64_t>(v));
    put_u64(bytes, fnv1a(bytes));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");

    Reader reader(bytes, path.string());
    const auto magic = reader.take(kMagic.size());
    if (std::memcmp(magic.data(), kMagic.data(), kMagic.size()) != 0) {
        throw CorruptFileError("'" + path.string() + "' is not a model file (bad magic)");
    }
    const std::uint32_t version = reader.u32();
    if (version != kModelFormatVersion) {
        throw VersionError("model file '" + path.string() + "' has format version " + std::to_string(version) +
                           "; this build reads version " + std::to_string(kModelFormatVersion));
    }
    const std::uint64_t header_len = reader.u64();
    if (header_len > bytes.size()) throw CorruptFileError("model file '" + path.string() + "' is truncated");
    const auto header_text = reader.take(header_len);
    const auto params = reader.doubles();
    const auto epochs = reader.doubles();
    const std::size_t payload_end = reader.position();
    const std::uint64_t checksum = reader.u64();
    if (reader.position() != bytes.size()) {
        throw CorruptFileError("model file '" + path.string() + "' has trailing bytes");
    }
    if (checksum != fnv1a(std::string_view(bytes).substr(0, payload_end))) {
        throw CorruptFileError("model file '" + path.string() + "' failed its checksum");
    }

    TrainedModel model;
    try {
        const auto header = nlohmann::json::parse(header_text);
        const auto& net = header.at("network");
        read_json(header.at("train"), "train", model.train_config);
        read_json(header.at("covariates"), "covariates", model.covariates);
        model.params = NetworkParams(net.at("input_size").get<std::size_t>(), net.at("hidden_size").get<std::size_t>(),
                                     net.at("num_layers").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw CorruptFileError("model file '" + path.string() + "' has a malformed header: " + e.what());
    }
    if (params.size() != model.params.size()) {
        throw CorruptFileError("model file '" + path.string() + "' parameter count does not match its network shape");
    }
    if (model.params.input_size() != 1 + model.covariates.channel_count()) {
        throw CorruptFileError("model file '" + path.string() + "' input size does not match its covariate spec");
    }
    std::copy(params.begin(), params.end(), model.params.values().begin());
    model.epoch_nll = epochs;
    model.format_version = version;
    return model;
}

} // namespace cellcast
