int capi_c_smoke_placeholder(void) { return 0; }
