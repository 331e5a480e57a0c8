# HDG multisymplecticity workbench
# Main package initialization
