#pragma once

#include <map>
#include <string>

#include "dcc/caption.h"
#include "dcc/langmodel.h"
#include "dcc/lexical.h"
#include "dcc/tensor.h"

namespace dcc {

/// Single-file binary container: a JSON manifest (model kind, dims,
/// vocabulary, concept set, config echo, declared tensor shapes) followed by
/// named f32 tensor blobs. Round-trips bit-exactly and is written
/// little-endian regardless of host byte order.
///
/// Layout: magic "DCCK" | u32 version=1 | u32 manifest_len | manifest JSON
/// (UTF-8) | u32 tensor_count | per tensor: u32 name_len, name, u32 ndim,
/// u32 x ndim dims, f32 x prod(dims) row-major data.
struct Checkpoint {
    nlohmann::json manifest;
    std::map<std::string, Tensor> tensors;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint lexical_to_checkpoint(const LexicalParams& params, nlohmann::json config_echo);
LexicalParams lexical_from_checkpoint(const Checkpoint& ckpt);

Checkpoint lm_to_checkpoint(const LanguageModelParams& params, nlohmann::json config_echo);
LanguageModelParams lm_from_checkpoint(const Checkpoint& ckpt);

Checkpoint caption_to_checkpoint(const CaptionModel& model, nlohmann::json config_echo);
CaptionModel caption_from_checkpoint(const Checkpoint& ckpt);

} // namespace dcc
