#pragma once

#define RELAYSEC_VERSION "0.1.0"
