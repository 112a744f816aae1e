#pragma once

// Binary checkpoint container.
//
// Layout (little-endian):
//   "SEIK" | u32 version | u64 header length | JSON header | tensor payload
// The header holds the network config, forward model, optimizer and rng state,
// the epoch counter and a tensor directory (name, dtype, shape, offset, bytes)
// whose offsets are relative to the payload start.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sei/network.hpp"
#include "sei/operators.hpp"
#include "sei/optim.hpp"

namespace sei {

struct StoredTensor {
    std::string name;
    std::string dtype;  // "f32" | "f64"
    Shape shape;
    std::vector<unsigned char> bytes;

    bool operator==(const StoredTensor&) const = default;
};

template <class T>
StoredTensor store_tensor(const std::string& name, const Tensor<T>& t);
template <class T>
StoredTensor store_buffer(const std::string& name, const Shape& shape, const std::vector<T>& v);
/// Converts to T when the stored dtype differs.
template <class T>
std::vector<T> stored_values(const StoredTensor& t);

struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    NetworkConfig network;
    ForwardModel model;
    std::string loss;       // loss kind the parameters were trained with
    std::string optimizer;  // "adam" | "sgd" | "none"
    std::uint64_t optimizer_step = 0;
    std::uint64_t epoch = 0;
    std::map<std::string, std::string> rng_states;
    std::vector<StoredTensor> tensors;  // parameters first, then optimizer moments

    const StoredTensor& tensor(const std::string& name) const;
    bool operator==(const Checkpoint&) const = default;
};

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Checkpoint with the network parameters and, when given, Adam moments.
template <class T>
Checkpoint make_checkpoint(const Network<T>& net, const ForwardModel& model,
                           const AdamState<T>* adam = nullptr);

/// Rebuilds the network stored in `ckpt` in precision T.
template <class T>
Network<T> network_from_checkpoint(const Checkpoint& ckpt);

/// Adam moments stored in `ckpt`; empty state when none were saved.
template <class T>
AdamState<T> adam_state_from_checkpoint(const Checkpoint& ckpt);

}  // namespace sei
