#include "psmaudit/error.hpp"

namespace psmaudit {

std::string toolkit_version() { return "psm-audit " PSMAUDIT_VERSION_STRING; }

}  // namespace psmaudit
