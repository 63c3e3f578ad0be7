// Placeholder during bring-up; the full CLI lands with the eval module.
int main() { return 0; }
