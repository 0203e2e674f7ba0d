#pragma once

#include <filesystem>

#include "meg/model.hpp"
#include "meg/synthetic.hpp"
#include "meg/trainer.hpp"

namespace meg {

/// JSON config loaders. Unknown keys are rejected so typos fail loudly;
/// omitted keys keep their defaults. All loaders validate before returning.
ModelConfig load_model_config(const std::filesystem::path& path);
TrainConfig load_train_config(const std::filesystem::path& path);
GenerationConfig load_generation_config(const std::filesystem::path& path);

}  // namespace meg
