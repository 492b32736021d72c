#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ionsim {

// CSV with "# key: value" provenance header lines. Numeric formatting is
// fixed ("%.12g") so identical runs produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(std::string path, std::vector<std::pair<std::string, std::string>> metadata,
              std::vector<std::string> columns);

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    void close();  // throws on write failure; also called by the destructor
    ~CsvWriter();

    static std::string format(double v);

  private:
    std::string path_;
    std::string buffer_;
    bool closed_ = false;
};

void write_text_file(const std::string& path, const std::string& text);

}  // namespace ionsim
