#pragma once

namespace xbn {

/// Configures the process logger from XBN_LOG (trace, debug, info, warn,
/// error, critical, off; default warn). Output goes to standard error.
void init_logging();

}  // namespace xbn
