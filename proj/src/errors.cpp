#include "abcfs/errors.hpp"

namespace abcfs {

namespace {

std::string join_violations(const std::vector<std::string>& violations)
{
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) {
            out += "; ";
        }
        out += v;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations))
{
}

}  // namespace abcfs
