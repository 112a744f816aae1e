#include "sei/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

#include "sei/error.hpp"
#include "sei/serialization.hpp"

namespace sei {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'I', 'K'};

static_assert(std::numeric_limits<float>::is_iec559 && std::numeric_limits<double>::is_iec559);

template <class T>
constexpr const char* dtype_name() {
    return std::is_same_v<T, float> ? "f32" : "f64";
}

std::size_t dtype_size(const std::string& dtype) {
    if (dtype == "f32") return 4;
    if (dtype == "f64") return 8;
    throw ValidationError("checkpoint: unknown dtype '" + dtype + "'");
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_le(const std::vector<unsigned char>& in, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
    return v;
}

std::string adam_name(const char* moment, const std::string& param) {
    return std::string("adam.") + moment + "." + param;
}

}  // namespace

template <class T>
StoredTensor store_buffer(const std::string& name, const Shape& shape, const std::vector<T>& v) {
    if (shape_numel(shape) != v.size()) throw DimensionError("store_buffer: shape does not match data");
    StoredTensor t{name, dtype_name<T>(), shape, std::vector<unsigned char>(v.size() * sizeof(T))};
    // Host byte order is little-endian on every supported target.
    if (!v.empty()) std::memcpy(t.bytes.data(), v.data(), t.bytes.size());
    return t;
}

template <class T>
StoredTensor store_tensor(const std::string& name, const Tensor<T>& t) {
    return store_buffer(name, t.shape(), t.values());
}

template <class T>
std::vector<T> stored_values(const StoredTensor& t) {
    const auto n = shape_numel(t.shape);
    if (t.bytes.size() != n * dtype_size(t.dtype)) {
        throw ValidationError("checkpoint: tensor '" + t.name + "' has inconsistent byte count");
    }
    std::vector<T> out(n);
    if (t.dtype == "f32") {
        std::vector<float> raw(n);
        if (n) std::memcpy(raw.data(), t.bytes.data(), t.bytes.size());
        std::copy(raw.begin(), raw.end(), out.begin());
    } else {
        std::vector<double> raw(n);
        if (n) std::memcpy(raw.data(), t.bytes.data(), t.bytes.size());
        std::transform(raw.begin(), raw.end(), out.begin(), [](double x) { return static_cast<T>(x); });
    }
    return out;
}

const StoredTensor& Checkpoint::tensor(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return t;
    throw ValidationError("checkpoint: no tensor named '" + name + "'");
}

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt) {
    Json directory = Json::array();
    std::uint64_t offset = 0;
    for (const auto& t : ckpt.tensors) {
        directory.push_back(Json{{"name", t.name},
                                 {"dtype", t.dtype},
                                 {"shape", t.shape},
                                 {"offset", offset},
                                 {"bytes", t.bytes.size()}});
        offset += t.bytes.size();
    }
    Json header{{"network", to_json(ckpt.network)},
                {"model", to_json(ckpt.model)},
                {"loss", ckpt.loss},
                {"optimizer", {{"kind", ckpt.optimizer}, {"step", ckpt.optimizer_step}}},
                {"epoch", ckpt.epoch},
                {"rng", ckpt.rng_states},
                {"tensors", directory}};
    const std::string text = header.dump();
    std::vector<unsigned char> out(kMagic, kMagic + 4);
    put_u32(out, Checkpoint::kVersion);
    put_u64(out, text.size());
    out.insert(out.end(), text.begin(), text.end());
    for (const auto& t : ckpt.tensors) out.insert(out.end(), t.bytes.begin(), t.bytes.end());
    return out;
}

Checkpoint parse_checkpoint(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ValidationError("checkpoint: bad magic (not an SEIK file)");
    }
    const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
    if (version != Checkpoint::kVersion) {
        throw ValidationError("checkpoint: unsupported version " + std::to_string(version));
    }
    const auto header_len = get_le(bytes, 8, 8);
    if (16 + header_len > bytes.size()) throw ValidationError("checkpoint: truncated header");
    Json header;
    try {
        header = Json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("checkpoint: malformed header: ") + e.what());
    }
    const std::size_t payload = 16 + header_len;
    Checkpoint ckpt;
    try {
        ckpt.network = network_config_from_json(header.at("network"));
        ckpt.model = forward_model_from_json(header.at("model"));
        ckpt.loss = header.at("loss").get<std::string>();
        ckpt.optimizer = header.at("optimizer").at("kind").get<std::string>();
        ckpt.optimizer_step = header.at("optimizer").at("step").get<std::uint64_t>();
        ckpt.epoch = header.at("epoch").get<std::uint64_t>();
        ckpt.rng_states = header.at("rng").get<std::map<std::string, std::string>>();
        for (const auto& entry : header.at("tensors")) {
            StoredTensor t;
            t.name = entry.at("name").get<std::string>();
            t.dtype = entry.at("dtype").get<std::string>();
            t.shape = entry.at("shape").get<Shape>();
            const auto off = entry.at("offset").get<std::uint64_t>();
            const auto len = entry.at("bytes").get<std::uint64_t>();
            if (len != shape_numel(t.shape) * dtype_size(t.dtype) || payload + off + len > bytes.size()) {
                throw ValidationError("checkpoint: tensor '" + t.name + "' exceeds the payload");
            }
            t.bytes.assign(bytes.begin() + static_cast<long>(payload + off),
                           bytes.begin() + static_cast<long>(payload + off + len));
            ckpt.tensors.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("checkpoint: malformed header: ") + e.what());
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_checkpoint(bytes);
}

template <class T>
Checkpoint make_checkpoint(const Network<T>& net, const ForwardModel& model, const AdamState<T>* adam) {
    Checkpoint ckpt;
    ckpt.network = net.config();
    ckpt.model = model;
    ckpt.optimizer = adam ? "adam" : "none";
    const auto named = net.named_parameters();
    for (const auto& [name, p] : named) ckpt.tensors.push_back(store_tensor(name, p));
    if (adam && !adam->m.empty()) {
        ckpt.optimizer_step = adam->step;
        for (std::size_t i = 0; i < named.size(); ++i) {
            ckpt.tensors.push_back(store_buffer(adam_name("m", named[i].first), named[i].second.shape(), adam->m[i]));
        }
        for (std::size_t i = 0; i < named.size(); ++i) {
            ckpt.tensors.push_back(store_buffer(adam_name("v", named[i].first), named[i].second.shape(), adam->v[i]));
        }
    }
    return ckpt;
}

template <class T>
Network<T> network_from_checkpoint(const Checkpoint& ckpt) {
    ckpt.network.validate();
    Rng unused;
    const Network<T> layout(ckpt.network, unused);
    std::vector<Tensor<T>> params;
    for (const auto& [name, p] : layout.named_parameters()) {
        const auto& stored = ckpt.tensor(name);
        if (stored.shape != p.shape()) {
            throw DimensionError("checkpoint: tensor '" + name + "' has shape " + shape_str(stored.shape) +
                                 ", network expects " + shape_str(p.shape()));
        }
        params.emplace_back(stored.shape, stored_values<T>(stored), true);
    }
    return Network<T>(ckpt.network, std::move(params));
}

template <class T>
AdamState<T> adam_state_from_checkpoint(const Checkpoint& ckpt) {
    AdamState<T> state;
    if (ckpt.optimizer != "adam") return state;
    const auto net = network_from_checkpoint<T>(ckpt);
    const auto named = net.named_parameters();
    const bool present = std::any_of(ckpt.tensors.begin(), ckpt.tensors.end(), [&](const StoredTensor& t) {
        return t.name == adam_name("m", named.front().first);
    });
    if (!present) return state;
    state.step = ckpt.optimizer_step;
    for (const auto& [name, p] : named) {
        state.m.push_back(stored_values<T>(ckpt.tensor(adam_name("m", name))));
        state.v.push_back(stored_values<T>(ckpt.tensor(adam_name("v", name))));
    }
    return state;
}

#define SEI_INSTANTIATE_CKPT(T)                                                                   \
    template StoredTensor store_tensor(const std::string&, const Tensor<T>&);                     \
    template StoredTensor store_buffer(const std::string&, const Shape&, const std::vector<T>&);  \
    template std::vector<T> stored_values(const StoredTensor&);                                   \
    template Checkpoint make_checkpoint(const Network<T>&, const ForwardModel&, const AdamState<T>*); \
    template Network<T> network_from_checkpoint(const Checkpoint&);                               \
    template AdamState<T> adam_state_from_checkpoint(const Checkpoint&);

SEI_INSTANTIATE_CKPT(float)
SEI_INSTANTIATE_CKPT(double)

}  // namespace sei
