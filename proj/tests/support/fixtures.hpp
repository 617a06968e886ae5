#pragma once

#include <memory>
#include <string>
#include <vector>

#include "blockdbg/core/program.hpp"

namespace blockdbg::testing {

// Absolute path under the source tree's corpus/ directory.
std::string corpus_path(const std::string& relative);

// Loads corpus/programs/<name>.blk.json.
Program load_corpus_program(const std::string& name);
std::shared_ptr<const Program> corpus_program_ptr(const std::string& name);

// Program names shipped in corpus/programs.
const std::vector<std::string>& corpus_program_names();

// Fresh directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

}  // namespace blockdbg::testing
