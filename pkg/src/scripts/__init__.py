"""Scripts module initialization."""