#pragma once

#define TWINREG_VERSION "0.1.0"
