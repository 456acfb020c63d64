#pragma once

#include <filesystem>
#include <string>

#include "torivec/ioutil.h"

namespace testutil {

// Fresh scratch directory under the test working directory.
inline std::string make_temp_dir(const std::string& name) {
  const std::string path = "tmp_" + name;
  std::filesystem::remove_all(path);
  std::filesystem::create_directories(path);
  return path;
}

}  // namespace testutil
